//! Exact-arithmetic sheaf cohomology on toric varieties.
//!
//! Fans, torus-invariant divisors, graded Čech cohomology of reflexive
//! rank-1 sheaves and log-differential sheaves, multiplication-map
//! correspondences, and machine checks of the classical toric vanishing
//! theorems — all over exact rationals or prime fields, with no floating
//! point anywhere.

pub mod cohomology;
pub mod guide;
pub mod divisors;
pub mod exactlin;
pub mod fans;
pub mod multmap;
pub mod verify;
