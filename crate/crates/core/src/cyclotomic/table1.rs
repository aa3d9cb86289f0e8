use serde::Serialize;

/// A known-good `(p, m, l, alpha)`: the cyclotomic family is a `(p, m, l; 1)`-1-CEDF.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct KnownRow {
    pub p: u64,
    pub m: usize,
    pub l: usize,
    pub alpha: u64,
}

const fn row(p: u64, m: usize, l: usize, alpha: u64) -> KnownRow {
    KnownRow { p, m, l, alpha }
}

/// Every parameter set with `m <= 50`, `2 <= l <= 10` and `m l^2 + 1` prime for which
/// some primitive root succeeds, with one succeeding root each. Ordered by `m`.
pub const KNOWN_ROWS: [KnownRow; 43] = [
    row(13, 3, 2, 2),
    row(17, 4, 2, 3),
    row(151, 6, 5, 6),
    row(29, 7, 2, 2),
    row(73, 8, 3, 5),
    row(37, 9, 2, 2),
    row(41, 10, 2, 6),
    row(53, 13, 2, 8),
    row(127, 14, 3, 116),
    row(61, 15, 2, 35),
    row(241, 15, 4, 7),
    row(401, 16, 5, 27),
    row(73, 18, 2, 5),
    row(1217, 19, 8, 642),
    row(181, 20, 3, 57),
    row(337, 21, 4, 10),
    row(757, 21, 6, 2),
    row(89, 22, 2, 51),
    row(199, 22, 3, 44),
    row(97, 24, 2, 5),
    row(101, 25, 2, 2),
    row(401, 25, 4, 3),
    row(109, 27, 2, 6),
    row(433, 27, 4, 94),
    row(113, 28, 2, 3),
    row(271, 30, 3, 142),
    row(137, 34, 2, 3),
    row(307, 34, 3, 241),
    row(577, 36, 4, 230),
    row(149, 37, 2, 2),
    row(593, 37, 4, 339),
    row(157, 39, 2, 142),
    row(641, 40, 4, 264),
    row(379, 42, 3, 233),
    row(673, 42, 4, 5),
    row(173, 43, 2, 128),
    row(1549, 43, 6, 1165),
    row(397, 44, 3, 296),
    row(181, 45, 2, 28),
    row(193, 48, 2, 5),
    row(433, 48, 3, 393),
    row(769, 48, 4, 453),
    row(197, 49, 2, 32),
];
