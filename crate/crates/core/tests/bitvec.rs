use proptest::prelude::*;
use streampart::bitvec::{PackedArray, PlaBitVector, PlaConfig, RankBitVector};

fn configs() -> impl Strategy<Value = PlaConfig> {
    (
        prop::sample::select(vec![2u32, 4, 8, 12, 32]),
        prop::sample::select(vec![1usize, 2, 16, 1024]),
    )
        .prop_map(|(c, d)| PlaConfig::new(c, d))
}

/// Bits with a mix of dense bursts and long gaps.
fn bit_patterns() -> impl Strategy<Value = Vec<bool>> {
    prop::collection::vec((0u64..400, 1u64..30, 0.0f64..1.0), 0..60).prop_map(|pieces| {
        let mut bits = Vec::new();
        for (gap, burst, density) in pieces {
            bits.extend(std::iter::repeat_n(false, gap as usize));
            for j in 0..burst {
                bits.push((j as f64 * density).fract() < density.max(0.05));
            }
        }
        bits
    })
}

fn check_all(bv: &PlaBitVector, bits: &[bool]) -> Result<(), TestCaseError> {
    let mut rank = 0u64;
    let mut positions = Vec::new();
    for (i, &b) in bits.iter().enumerate() {
        rank += b as u64;
        if b {
            positions.push(i as u64);
        }
        prop_assert_eq!(bv.rank1(i as u64), Some(rank), "rank1({})", i);
        prop_assert_eq!(bv.get(i as u64), Some(b));
    }
    prop_assert_eq!(bv.rank1(bits.len() as u64), None);
    for (x, &p) in positions.iter().enumerate() {
        prop_assert_eq!(bv.select1(x as u64 + 1), Some(p));
    }
    prop_assert_eq!(bv.select1(positions.len() as u64 + 1), None);
    prop_assert_eq!(bv.select1(0), None);
    prop_assert_eq!(bv.count_ones(), positions.len() as u64);
    Ok(())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn pla_matches_naive_scan(bits in bit_patterns(), cfg in configs()) {
        let mut bv = PlaBitVector::new(cfg);
        for &b in &bits {
            bv.push(b);
        }
        check_all(&bv, &bits)?;
        bv.flush();
        check_all(&bv, &bits)?;
    }

    #[test]
    fn flush_is_transparent_under_interleaving(
        bits in bit_patterns(),
        cfg in configs(),
        flush_every in 1usize..300,
        probe_seed in any::<u64>(),
    ) {
        let mut bv = PlaBitVector::new(cfg);
        let mut rank = Vec::with_capacity(bits.len());
        let mut r = 0u64;
        for (i, &b) in bits.iter().enumerate() {
            bv.push(b);
            r += b as u64;
            rank.push(r);
            if i % flush_every == flush_every - 1 {
                bv.flush();
            }
            // probe a pseudo-random earlier position after each append
            let j = (probe_seed.wrapping_mul(i as u64 + 1) >> 7) % (i as u64 + 1);
            prop_assert_eq!(bv.rank1(j), Some(rank[j as usize]));
            if r > 0 {
                let x = 1 + (probe_seed ^ i as u64) % r;
                let p = bv.select1(x).unwrap();
                prop_assert_eq!(rank[p as usize], x);
                prop_assert!(bits[p as usize]);
            }
        }
        check_all(&bv, &bits)?;
    }

    #[test]
    fn push_zeros_equals_repeated_push(gaps in prop::collection::vec(0u64..5000, 1..40), cfg in configs()) {
        let mut a = PlaBitVector::new(cfg);
        let mut b = PlaBitVector::new(cfg);
        let mut bits = Vec::new();
        for &g in &gaps {
            a.push_zeros(g);
            for _ in 0..g {
                b.push(false);
            }
            a.push(true);
            b.push(true);
            bits.extend(std::iter::repeat_n(false, g as usize));
            bits.push(true);
        }
        prop_assert_eq!(a.len(), b.len());
        check_all(&a, &bits)?;
    }

    #[test]
    fn rank_bitvector_matches_naive(bits in prop::collection::vec(any::<bool>(), 0..3000)) {
        let bv = RankBitVector::from_bits(bits.iter().copied());
        let mut r = 0;
        for (i, &b) in bits.iter().enumerate() {
            r += b as u64;
            prop_assert_eq!(bv.rank1(i as u64), Some(r));
            if b {
                prop_assert_eq!(bv.select1(r), Some(i as u64));
            }
        }
    }

    #[test]
    fn packed_array_round_trip(width in 1u32..=64, vals in prop::collection::vec(any::<u64>(), 0..300)) {
        let mask = if width == 64 { u64::MAX } else { (1 << width) - 1 };
        let mut a = PackedArray::new(width);
        for &v in &vals {
            a.push(v & mask);
        }
        for (i, &v) in vals.iter().enumerate() {
            prop_assert_eq!(a.get(i as u64), Some(v & mask));
        }
        prop_assert_eq!(a.get(vals.len() as u64), None);
    }
}

#[test]
fn corrections_bound_compression() {
    // Evenly spaced ones fit in a single zero-correction segment.
    let mut bv = PlaBitVector::new(PlaConfig::new(8, 1));
    for i in 0..100_000u64 {
        bv.push(i % 100 == 0);
    }
    bv.flush();
    assert!(bv.segment_count() <= 2, "{} segments", bv.segment_count());
    assert!(bv.size_in_bytes() < 2_000, "{} bytes", bv.size_in_bytes());
}

#[test]
fn empty_vector_queries() {
    let bv = PlaBitVector::default();
    assert_eq!(bv.rank1(0), None);
    assert_eq!(bv.select1(1), None);
    assert!(bv.is_empty());
}
