"""Tab-separated file formats for action graphs, follower sets and roles.

Edge list:     ``src_id<TAB>dst_id<TAB>weight``
Follower sets: ``bot_id<TAB>follower_id``
Roles:         ``user_id<TAB>{bot|legit|seed}``

Lines starting with ``#`` and blank lines are ignored.
"""
from __future__ import annotations

from collections import defaultdict
from pathlib import Path

from .graph import ActionGraph, ActionGraphError, BotnetInstance, UserRole, build_action_graph


def _rows(path, ncols):
    path = Path(path)
    with path.open(encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, 1):
            line = line.rstrip("\n").rstrip("\r")
            if not line.strip() or line.startswith("#"):
                continue
            parts = line.split("\t")
            if len(parts) != ncols:
                raise ValueError(f"{path}:{lineno}: expected {ncols} tab-separated fields, got {len(parts)}")
            yield lineno, parts


def _int(path, lineno, text):
    try:
        return int(text)
    except ValueError:
        raise ValueError(f"{path}:{lineno}: not an integer: {text!r}") from None


def read_edge_list(path, isolated=()) -> ActionGraph:
    records, lines = [], []
    for lineno, (s, d, w) in _rows(path, 3):
        records.append((_int(path, lineno, s), _int(path, lineno, d), _int(path, lineno, w)))
        lines.append(lineno)
    try:
        return build_action_graph(records, isolated)
    except ActionGraphError as exc:
        # rewrite record indices as file line numbers
        msgs = []
        for msg in exc.errors:
            idx = int(msg.split(":", 1)[0].split()[1])
            msgs.append(f"{path}:{lines[idx]}:" + msg.split(":", 1)[1])
        raise ActionGraphError(msgs) from None


def write_edge_list(graph: ActionGraph, path) -> None:
    with Path(path).open("w", encoding="utf-8", newline="\n") as fh:
        fh.write("# src_id\tdst_id\tweight\n")
        for (s, d) in sorted(graph.arcs):
            fh.write(f"{s}\t{d}\t{graph.arcs[(s, d)]}\n")


def read_follower_sets(path, bots=()) -> BotnetInstance:
    """Load follower sets. Bots listed in ``bots`` but absent from the file get no followers."""
    followers = defaultdict(set)
    for b in bots:
        followers[b]
    for lineno, (b, f) in _rows(path, 2):
        followers[_int(path, lineno, b)].add(_int(path, lineno, f))
    return BotnetInstance(tuple(followers), {b: frozenset(fs) for b, fs in followers.items()})


def write_follower_sets(botnet: BotnetInstance, path) -> None:
    with Path(path).open("w", encoding="utf-8", newline="\n") as fh:
        fh.write("# bot_id\tfollower_id\n")
        for b in botnet.bots:
            for f in sorted(botnet.followers[b]):
                fh.write(f"{b}\t{f}\n")


def read_roles(path) -> dict:
    roles = {}
    for lineno, (u, r) in _rows(path, 2):
        try:
            role = UserRole(r.strip().lower())
        except ValueError:
            raise ValueError(f"{path}:{lineno}: unknown role {r!r}") from None
        uid = _int(path, lineno, u)
        if uid in roles:
            raise ValueError(f"{path}:{lineno}: duplicate role for user {uid}")
        roles[uid] = role
    return roles


def write_roles(roles, path) -> None:
    with Path(path).open("w", encoding="utf-8", newline="\n") as fh:
        fh.write("# user_id\trole\n")
        for u in sorted(roles):
            fh.write(f"{u}\t{roles[u].value}\n")
