//! Speed unit conversions. Everything inside the crate is SI; miles per
//! hour only appear at I/O boundaries.

use crate::scalar::Scalar;

/// Exact definition: 1 mph = 0.44704 m/s.
pub const MPS_PER_MPH: f64 = 0.44704;

pub fn mph_to_mps<T: Scalar>(mph: T) -> T {
    mph * T::lit(MPS_PER_MPH)
}

pub fn mps_to_mph<T: Scalar>(mps: T) -> T {
    mps / T::lit(MPS_PER_MPH)
}
