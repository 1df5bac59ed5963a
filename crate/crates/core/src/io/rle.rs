//! Run-length encoding of binary masks: space-separated decimal counts of
//! alternating unset/set pixel runs in column-major order (all of column 0
//! top to bottom, then column 1, …). The first count is the number of
//! leading unset pixels and may be 0.

use crate::error::{Error, Result};
use crate::mask::BinaryMask;

/// Encodes a mask as run-length counts. The counts always sum to
/// `width · height`, and only the first may be 0.
pub fn rle_encode(mask: &BinaryMask) -> String {
    let mut counts: Vec<u64> = Vec::new();
    let mut current = false; // runs start counting unset pixels
    let mut run: u64 = 0;
    for x in 0..mask.width() {
        for y in 0..mask.height() {
            let bit = mask.get(x, y);
            if bit == current {
                run += 1;
            } else {
                counts.push(run);
                current = bit;
                run = 1;
            }
        }
    }
    counts.push(run);
    let parts: Vec<String> = counts.iter().map(u64::to_string).collect();
    parts.join(" ")
}

/// Decodes run-length counts into a `width`×`height` mask.
///
/// Accepts any whitespace-separated counts that sum to exactly
/// `width · height`; the first run is unset pixels.
pub fn rle_decode(counts: &str, width: u32, height: u32) -> Result<BinaryMask> {
    let mut mask = BinaryMask::new(width, height)?;
    let total = u64::from(width) * u64::from(height);
    let mut covered: u64 = 0;
    let mut value = false;
    for token in counts.split_whitespace() {
        let run: u64 = token.parse().map_err(|_| {
            Error::Schema(format!(
                "run-length count {token:?} is not a non-negative integer"
            ))
        })?;
        if covered + run > total {
            return Err(Error::Schema(format!(
                "run-length counts exceed the {width}x{height} pixel count"
            )));
        }
        if value {
            for i in covered..covered + run {
                // Column-major: pixel index i is column i / height, row i % height.
                let x = (i / u64::from(height)) as u32;
                let y = (i % u64::from(height)) as u32;
                mask.set(x, y, true);
            }
        }
        covered += run;
        value = !value;
    }
    if covered != total {
        return Err(Error::Schema(format!(
            "run-length counts cover {covered} of {total} pixels"
        )));
    }
    Ok(mask)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn zero_prefix_means_mask_starts_set() {
        let mask = rle_decode("0 4", 2, 2).unwrap();
        assert_eq!(mask.area(), 4);
    }

    #[test]
    fn counts_are_column_major() {
        // 3×2 mask with only pixel (0, 0) set: traversal order is
        // (0,0) (0,1) (1,0) (1,1) (2,0) (2,1).
        let mut mask = BinaryMask::new(3, 2).unwrap();
        mask.set(0, 0, true);
        assert_eq!(rle_encode(&mask), "0 1 5");

        let decoded = rle_decode("0 1 5", 3, 2).unwrap();
        assert_eq!(decoded, mask);
    }

    #[test]
    fn empty_mask_is_one_count() {
        let mask = BinaryMask::new(4, 3).unwrap();
        assert_eq!(rle_encode(&mask), "12");
        assert_eq!(rle_decode("12", 4, 3).unwrap(), mask);
    }

    #[test]
    fn malformed_counts_are_rejected() {
        assert!(matches!(rle_decode("1 2", 2, 2), Err(Error::Schema(_))));
        assert!(matches!(rle_decode("5", 2, 2), Err(Error::Schema(_))));
        assert!(matches!(rle_decode("", 2, 2), Err(Error::Schema(_))));
        assert!(matches!(rle_decode("one 3", 2, 2), Err(Error::Schema(_))));
        assert!(matches!(rle_decode("-1 5", 2, 2), Err(Error::Schema(_))));
    }

    #[test]
    fn interior_zero_counts_are_tolerated() {
        // Non-canonical but unambiguous: "2 0 2" = 2 unset, 0 set, 2 unset.
        let decoded = rle_decode("2 0 2", 2, 2).unwrap();
        assert!(decoded.is_empty());
    }

    proptest! {
        #[test]
        fn decode_inverts_encode(
            width in 1u32..24,
            height in 1u32..24,
            fill in proptest::collection::vec(any::<bool>(), 0..600),
        ) {
            let mut mask = BinaryMask::new(width, height).unwrap();
            for (i, bit) in fill.iter().enumerate() {
                let i = i as u32 % (width * height);
                mask.set(i % width, i / width, *bit);
            }
            let encoded = rle_encode(&mask);
            prop_assert_eq!(rle_decode(&encoded, width, height).unwrap(), mask);
        }
    }
}
