"""The table of integer cycles (p, q, u, cycle) used as a reproduction target.

Each cycle is listed in its original order, starting after ``u`` and usually
ending at it.  Two long rows may be incomplete as listed; they are flagged
``partial`` and only need to be contained in a computed cycle.
"""

from __future__ import annotations

from typing import NamedTuple


class TableRow(NamedTuple):
    p: int
    q: int
    u: int
    cycle: tuple[int, ...]
    partial: bool = False


ROWS = [
    TableRow(2, 3, -17, (-25, -37, -55, -82, -41, -61, -91, -136, -68, -34, -17)),
    TableRow(3, 11, -25, (-91, -333, -111, -37, -135, -45, -15, -5, -18, -6, -2, -7, -25)),
    TableRow(3, 13, -47, (-203, -879, -293, -1269, -423, -141, -47)),
    TableRow(5, 7, -32, (-44, -61, -85, -17, -23, -32)),
    TableRow(5, 13, -2, (-5, -1, -2)),
    TableRow(7, 17, -9, (-21, -3, -7, -1, -2, -4, -9)),
    TableRow(7, 19, -13, (-35, -5, -13)),
    TableRow(
        11, 13, -17,
        (-20, -23, -27, -31, -36, -42, -49, -57, -67, -79, -93, -109, -128, -151, -178, -210, -248,
         -293, -346, -408, -482, -569, -672, -794, -938, -1108, -1309, -119, -140, -165, -15, -17),
        partial=True,
    ),
    TableRow(11, 19, -13, (-22, -2, -3, -5, -8, -13)),
    TableRow(11, 37, -13, (-43, -144, -484, -44, -4, -13)),
    TableRow(13, 19, -10, (-14, -20, -29, -42, -61, -89, -130, -10)),
    TableRow(13, 47, -10, (-36, -130, -10)),
    TableRow(
        17, 29, -13,
        (-22, -37, -63, -107, -182, -310, -528, -900, -1535, -2618, -154, -262, -446, -760, -1296,
         -2210, -130, -221, -13),
    ),
    TableRow(17, 37, -8, (-17, -1, -2, -4, -8)),
    TableRow(17, 41, -21, (-50, -120, -289, -17, -1, -2, -4, -9, -21)),
    TableRow(17, 73, -4, (-17, -1, -4)),
    TableRow(19, 29, -41, (-62, -94, -143, -218, -332, -506, -772, -1178), partial=True),
    TableRow(19, 83, -74, (-323, -17, -74)),
    TableRow(
        23, 29, -15,
        (-18, -22, -27, -34, -42, -52, -65, -81, -102, -128, -161, -7, -8, -10, -12, -15),
    ),
    TableRow(23, 53, -20, (-46, -2, -4, -9, -20)),
    TableRow(29, 47, -13, (-21, -34, -55, -89, -144, -233, -377, -13)),
    TableRow(
        37, 47, -19,
        (-24, -30, -38, -48, -60, -76, -96, -121, -153, -194, -246, -312, -396, -503, -638, -810,
         -1028, -1305, -1657, -2104, -2672, -3394, -4311, -5476, -148, -4, -5, -6, -7, -8, -10, -12,
         -15, -19),
    ),
    TableRow(
        41, 53, -23,
        (-29, -37, -47, -60, -77, -99, -127, -164, -4, -5, -6, -7, -9, -11, -14, -18, -23),
    ),
    TableRow(
        47, 83, -17,
        (-30, -52, -91, -160, -282, -6, -10, -17, -30, -52, -91, -160, -282, -6, -10, -17),
    ),
    TableRow(
        71, 97, -13,
        (-17, -23, -31, -42, -57, -77, -105, -143, -195, -266, -363, -495, -676, -923, -13),
    ),
    TableRow(
        73, 97, -23,
        (-30, -39, -51, -67, -89, -118, -156, -207, -275, -365, -5, -6, -7, -9, -11, -14, -18, -23),
    ),
]

PAIRS = list(dict.fromkeys((row.p, row.q) for row in ROWS))
