//! Scalar types used for metric values.

use std::fmt::Debug;

use num_rational::Ratio;
use num_traits::Num;

/// A numeric type that evaluation metrics can be expressed in.
///
/// Metrics are ratios of mention counts, so a scalar only needs to be built
/// from a count and support field arithmetic. Floating point types give
/// approximate values; [`Ratio`] gives exact ones.
pub trait Scalar: Num + Clone + PartialOrd + Debug + Send + Sync {
    fn from_count(n: u64) -> Self;

    fn to_f64(&self) -> f64;

    /// `num / den`, or zero when `den` is zero.
    fn ratio(num: u64, den: u64) -> Self {
        if den == 0 {
            Self::zero()
        } else {
            Self::from_count(num) / Self::from_count(den)
        }
    }
}

impl Scalar for f64 {
    fn from_count(n: u64) -> Self {
        n as f64
    }

    fn to_f64(&self) -> f64 {
        *self
    }
}

impl Scalar for f32 {
    fn from_count(n: u64) -> Self {
        n as f32
    }

    fn to_f64(&self) -> f64 {
        f64::from(*self)
    }
}

impl Scalar for Ratio<i64> {
    fn from_count(n: u64) -> Self {
        Ratio::from_integer(i64::try_from(n).expect("count fits in i64"))
    }

    fn to_f64(&self) -> f64 {
        *self.numer() as f64 / *self.denom() as f64
    }
}

/// Rounds `num / den` (a fraction in `[0, 1]`) to hundredths of a percent,
/// resolving exact ties to the even neighbour. Returns zero when `den` is zero.
pub fn percent_hundredths(num: u64, den: u64) -> u32 {
    if den == 0 {
        return 0;
    }
    let scaled = u128::from(num) * 10_000;
    let den = u128::from(den);
    let q = scaled / den;
    let r = scaled % den;
    let rounded = match (2 * r).cmp(&den) {
        std::cmp::Ordering::Less => q,
        std::cmp::Ordering::Greater => q + 1,
        std::cmp::Ordering::Equal => q + (q & 1),
    };
    u32::try_from(rounded).expect("percentage fits in u32")
}
