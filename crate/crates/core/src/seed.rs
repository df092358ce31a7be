//! Deterministic sub-seed derivation so one master seed reproduces a whole
//! run, including work farmed out to threads.

/// Golden-ratio increment used by the splitmix generator.
const GAMMA: u64 = 0x9E37_79B9_7F4A_7C15;

/// The splitmix64 output mix.
#[inline]
pub fn splitmix64(state: u64) -> u64 {
    let mut z = state.wrapping_add(GAMMA);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Sub-seed `index` of a master seed: `splitmix64(master ^ (index * gamma))`.
/// Distinct indices give independent streams; the mapping is stable and part
/// of the reproducibility contract.
#[inline]
pub fn derive_subseed(master: u64, index: u64) -> u64 {
    splitmix64(master ^ index.wrapping_mul(GAMMA))
}
