//! Dormand-Prince 5(4) coefficients, stored as exact rationals.

pub(crate) const fn r(num: i64, den: i64) -> f64 {
    num as f64 / den as f64
}

pub const C: [f64; 7] = [0.0, r(1, 5), r(3, 10), r(4, 5), r(8, 9), 1.0, 1.0];

pub const A: [[f64; 6]; 7] = [
    [0.0; 6],
    [r(1, 5), 0.0, 0.0, 0.0, 0.0, 0.0],
    [r(3, 40), r(9, 40), 0.0, 0.0, 0.0, 0.0],
    [r(44, 45), r(-56, 15), r(32, 9), 0.0, 0.0, 0.0],
    [r(19372, 6561), r(-25360, 2187), r(64448, 6561), r(-212, 729), 0.0, 0.0],
    [r(9017, 3168), r(-355, 33), r(46732, 5247), r(49, 176), r(-5103, 18656), 0.0],
    [r(35, 384), 0.0, r(500, 1113), r(125, 192), r(-2187, 6784), r(11, 84)],
];

/// Fifth-order weights (equal to the last row of `A`: first same as last).
pub const B: [f64; 7] = [r(35, 384), 0.0, r(500, 1113), r(125, 192), r(-2187, 6784), r(11, 84), 0.0];

/// Embedded fourth-order weights.
pub const B_HAT: [f64; 7] =
    [r(5179, 57600), 0.0, r(7571, 16695), r(393, 640), r(-92097, 339200), r(187, 2100), r(1, 40)];

/// Coefficients of the fifth-order continuous extension.
pub const DENSE: [f64; 7] = [
    r(-12715105075, 11282082432),
    0.0,
    r(87487479700, 32700410799),
    r(-10690763975, 1880347072),
    r(701980252875, 199316789632),
    r(-1453857185, 822651844),
    r(69997945, 29380423),
];

/// Sum of every coefficient in the tables; pinned by a test.
pub fn checksum() -> f64 {
    let a: f64 = A.iter().flatten().sum();
    C.iter().sum::<f64>() + a + B.iter().sum::<f64>() + B_HAT.iter().sum::<f64>() + DENSE.iter().sum::<f64>()
}
