use num::BigRational;
use num::{BigInt, Zero};

use crate::error::{Error, Result};

/// 4-base encoding of a binary string: Enc(w) = Σ_i w_i / 4^i, exact in
/// rational arithmetic. The image lies in [0, 1/3].
pub fn enc4(w: &str) -> Result<BigRational> {
    let mut acc = BigRational::zero();
    let mut denom = BigInt::from(1);
    for c in w.chars() {
        denom *= 4;
        match c {
            '0' => {}
            '1' => acc += BigRational::new(BigInt::from(1), denom.clone()),
            other => {
                return Err(Error::UnknownSymbol {
                    symbol: other.to_string(),
                    alphabet: vec!["0".into(), "1".into()],
                })
            }
        }
    }
    Ok(acc)
}
