//! Stable child-seed derivation. A run has one root seed; every consumer
//! gets `derive(root, component, indices)`, so any single cell can be
//! re-run in isolation and results never depend on scheduling.

const FNV_OFFSET: u64 = 0xcbf2_9ce4_8422_2325;
const FNV_PRIME: u64 = 0x0000_0100_0000_01b3;

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

pub fn derive(root: u64, component: &str, indices: &[u64]) -> u64 {
    let mut h = FNV_OFFSET;
    let mut feed = |bytes: &[u8]| {
        for &b in bytes {
            h ^= u64::from(b);
            h = h.wrapping_mul(FNV_PRIME);
        }
    };
    feed(&root.to_le_bytes());
    feed(component.as_bytes());
    feed(&[0xff]);
    for i in indices {
        feed(&i.to_le_bytes());
    }
    splitmix64(h)
}
