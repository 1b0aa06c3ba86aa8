//! NTRU lattice encryption with public-key expansion.
//!
//! An end entity generates one NTRU key pair. Authorities can then multiply its
//! public key by small random ring elements to mint unlinkable *expanded* keys
//! that the original private key still decrypts. Two issuance flows are built
//! on that primitive:
//!
//! * direct: the end entity asks a certificate authority for a pseudonym
//!   certificate whose key is `w = h·r`;
//! * butterfly: a registration authority expands `h` into the cocoon key
//!   `u = h·d`, and the certificate authority expands that into the butterfly
//!   key `v = u·r`, so neither authority can link `v` back to `h` alone.
//!
//! Module map:
//!
//! | module        | contents                                              |
//! |---------------|-------------------------------------------------------|
//! | [`poly`]      | ring arithmetic, inverses, ternary sampling           |
//! | [`params`]    | parameter sets and presets                            |
//! | [`ntru`]      | key generation, encryption, decryption                |
//! | [`expansion`] | expander secrets and expanded public keys             |
//! | [`encoding`]  | byte ↔ trit framing with CRC-32 integrity check       |
//! | [`cert`]      | pseudonym certificates and multi-block encryption     |
//! | [`protocol`]  | EE / RA / CA actors and flow transcripts              |
//! | [`bench`]     | keygen vs. expansion timing harness                   |
//! | [`keyfile`]   | key and ciphertext container files                    |
//! | [`api`]       | JSON request/response bodies shared by server/client  |

pub mod api;
pub mod bench;
pub mod cert;
pub mod encoding;
mod error;
pub mod expansion;
pub mod keyfile;
pub mod ntru;
pub mod params;
pub mod poly;
pub mod protocol;
pub mod rng;
mod wire;

pub use error::{Error, Result};
pub use expansion::{ExpandedPublicKey, ExpanderRole, ExpanderSecret};
pub use ntru::{CiphertextBlock, KeyPair, PrivateKey, PublicKey};
pub use params::{NtruParams, Preset};
pub use poly::RingElement;
