//! Succinct building blocks: bitmaps with rank/select, wavelet trees,
//! permutations with fast inverse, and directly addressable codes.

pub mod bits;
pub mod dac;
pub mod perm;
pub mod plain;
pub mod sparse;
pub mod wavelet;

pub use bits::{BitBuf, IntVec};
pub use dac::Dac;
pub use perm::Permutation;
pub use plain::PlainBitmap;
pub use sparse::SparseBitmap;
pub use wavelet::WaveletTree;
