"""Named profiles taken from the worked examples of the lecture notes."""

from __future__ import annotations

from .core import Profile, ScrutineerError

_ABC = ("a", "b", "c")
_ABCD = ("a", "b", "c", "d")
_ABCDE = ("a", "b", "c", "d", "e")

_CATALOG = {
    # Roman Senate trial: acquit, banish, condemn.
    "PLINY": (_ABC, [(102, "abc"), (101, "bac"), (100, "cba")]),
    # 2000 Florida vote shares in percent.
    "GORE": (
        ("Buchanan", "Bush", "Gore", "Nader"),
        [
            (2, "Nader>Gore>Bush>Buchanan"),
            (49, "Gore>Bush>Nader>Buchanan"),
            (48, "Bush>Buchanan>Gore>Nader"),
            (1, "Buchanan>Bush>Gore>Nader"),
        ],
    ),
    "CONDORCET1": (_ABC, [(1, "abc"), (1, "bca"), (1, "cab")]),
    "CONDORCET2": (_ABC, [(102, "abc"), (101, "bca"), (100, "cab")]),
    "CONDORCET3": (_ABCD, [(1, "abcd"), (1, "bcad"), (1, "cabd")]),
    "RUNOFF_A": (_ABC, [(8, "abc"), (10, "cab"), (7, "bca")]),
    "RUNOFF_B": (_ABC, [(6, "abc"), (2, "cab"), (10, "cab"), (7, "bca")]),
    "ZWICKER": (_ABCDE, [(2, "abcde"), (3, "debca"), (2, "ecadb")]),
    "SP_RESOLUTE": (_ABC, [(1, "abc"), (1, "bac"), (1, "cba")]),
    "DYNAMIC": (_ABC, [(1, "acb"), (1, "bca"), (1, "cba")]),
    "YOUNG": (_ABC, [(23, "abc"), (17, "bca"), (2, "bac"), (10, "cab"), (8, "cba")]),
    "HIKERS": (("l", "m", "s"), [(1, "lms"), (1, "sml"), (1, "msl")]),
    "FALISZ": (
        _ABCDE,
        [(1, "abcde"), (1, "eabdc"), (1, "dabce"), (1, "cbdea"), (1, "cbead"), (1, "bcdea")],
    ),
    "BARBERA": (
        _ABCDE,
        [(1, "abcde"), (1, "abecd"), (1, "abdec"), (1, "cdeab"), (1, "ecdab"), (1, "decab")],
    ),
}

FIXTURE_NAMES = tuple(_CATALOG)


def fixture(name):
    """Return the named example profile (voters expanded in table order)."""
    try:
        labels, rows = _CATALOG[name.upper()]
    except KeyError:
        raise ScrutineerError(
            f"unknown fixture {name!r}; choose from {', '.join(FIXTURE_NAMES)}"
        ) from None
    return Profile.from_counts(labels, rows)
