//! Scalar abstraction for simulated time.
//!
//! Every duration and timestamp in the simulator is generic over [`Time`], so the
//! same engine runs on `f64` (the default), `f32`, integer ticks (`u64`), or exact
//! rationals (`Ratio<i64>`). Tests that compare against closed forms use the exact
//! instantiations.

use std::cmp::Ordering;
use std::fmt::{Debug, Display};

use num_traits::{FromPrimitive, Num, ToPrimitive};

pub trait Time:
    Num + Copy + PartialOrd + FromPrimitive + ToPrimitive + Debug + Display + Send + Sync + 'static
{
    /// Converts an event or attempt count into a time multiplier.
    fn from_count(n: u64) -> Self {
        Self::from_u64(n).expect("count not representable in time scalar")
    }

    fn max_of(self, other: Self) -> Self {
        if other > self {
            other
        } else {
            self
        }
    }

    /// Total order used by the event queue. NaN is rejected at configuration time.
    fn total_cmp(&self, other: &Self) -> Ordering {
        self.partial_cmp(other).expect("unordered time value")
    }

    fn is_negative(&self) -> bool {
        *self < Self::zero()
    }

    fn as_f64(&self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }
}

impl<T> Time for T where
    T: Num
        + Copy
        + PartialOrd
        + FromPrimitive
        + ToPrimitive
        + Debug
        + Display
        + Send
        + Sync
        + 'static
{
}
