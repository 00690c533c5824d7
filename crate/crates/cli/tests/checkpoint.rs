use fuzzmech_cli::checkpoint::Checkpoint;
use fuzzmech_core::UniformGrid;
use proptest::prelude::*;

fn checkpoint() -> impl Strategy<Value = Checkpoint> {
    (1usize..=3, any::<bool>(), any::<bool>(), any::<u8>())
        .prop_flat_map(|(dim, gamma, v, open)| {
            let counts = prop::collection::vec(8usize..12, dim);
            let lengths = prop::collection::vec(0.1f64..100.0, dim);
            (Just((dim, gamma, v, open)), counts, lengths, any::<f64>(), any::<f64>(), any::<u64>())
        })
        .prop_map(|((dim, gamma, v, open), counts, lengths, mu, t, seed)| {
            let periodic = (0..dim).map(|a| open & (1 << a) == 0).collect();
            let grid = UniformGrid::new(counts, lengths, periodic).unwrap();
            let n = grid.len();
            // arbitrary bit patterns, NaN payloads included
            let mut state = seed | 1;
            let mut next = move || {
                state ^= state << 13;
                state ^= state >> 7;
                state ^= state << 17;
                f64::from_bits(state)
            };
            let w = (0..n).map(|_| next()).collect();
            let gamma = gamma.then(|| (0..n).map(|_| next()).collect());
            let v = v.then(|| (0..dim).map(|_| (0..n).map(|_| next()).collect()).collect());
            Checkpoint { grid, mu, t, w, gamma, v }
        })
}

proptest! {
    #[test]
    fn round_trip_is_bit_exact(c in checkpoint()) {
        let bytes = c.to_bytes();
        let back = Checkpoint::from_bytes(&bytes).unwrap();
        prop_assert_eq!(back.to_bytes(), bytes);
        prop_assert_eq!(back.grid, c.grid);
    }

    #[test]
    fn any_truncation_is_rejected(c in checkpoint(), cut in 1usize..64) {
        let bytes = c.to_bytes();
        let keep = bytes.len().saturating_sub(cut);
        prop_assert!(Checkpoint::from_bytes(&bytes[..keep]).is_err());
        let mut longer = bytes.clone();
        longer.extend(std::iter::repeat_n(0u8, cut));
        prop_assert!(Checkpoint::from_bytes(&longer).is_err());
    }
}

#[test]
fn file_round_trip() {
    let dir = tempfile::TempDir::new().unwrap();
    let grid = UniformGrid::periodic_1d(16, 4.0).unwrap();
    let c = Checkpoint { grid, mu: 2.0, t: 0.5, w: (0..16).map(f64::from).collect(), gamma: None, v: None };
    let path = dir.path().join("c.fzm");
    c.write(&path).unwrap();
    assert_eq!(Checkpoint::read(&path).unwrap(), c);
    let bytes = std::fs::read(&path).unwrap();
    assert_eq!(&bytes[..4], b"FZM1");
    assert_eq!(bytes.len(), 4 + 2 + 2 + 4 + 8 + 8 + 8 + 4 + 16 * 8);
}
