//! Additive toy cipher used by the worked signing examples.
//!
//! Nothing here is cryptography. The hash is a plain sum of 7-bit character
//! codes, and encryption adds a key modulo a fixed modulus, so a paired key
//! (`d + e = 0 mod m`) undoes it. The point is to make key pairing,
//! certificate checking, and signature comparison small enough to follow by
//! hand; see [`weakness`] notes on what the scheme provably cannot detect.
//!
//! [`weakness`]: #weakness
//!
//! # Weakness
//!
//! Because the hash is a character sum, any tampering that preserves the
//! sum (for example transposing two characters) goes undetected. Tests
//! assert this openly rather than pretending otherwise.

pub mod handlers;

use std::fmt;

/// Default modulus for key pairs and ciphers: a prime comfortably above
/// any realistic message hash in the examples.
pub const DEFAULT_MODULUS: u64 = 1_000_003;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum PkiError {
    #[error("character at index {index} is not 7-bit ASCII")]
    NonAscii { index: usize },
    #[error("value {value} is outside the cipher domain [0, {modulus})")]
    ValueOutOfRange { value: u64, modulus: u64 },
    #[error("validity window is empty: from {from} until {until}")]
    BadValidity { from: u64, until: u64 },
}

/// Sum of the 7-bit code points of `text`. Errors name the first
/// offending character index.
pub fn ascii_hash(text: &str) -> Result<u64, PkiError> {
    hash_terms(text).map(|terms| terms.iter().sum())
}

/// The individual code points whose sum is [`ascii_hash`]; the demo prints
/// these as an addition chain.
pub fn hash_terms(text: &str) -> Result<Vec<u64>, PkiError> {
    text.chars()
        .enumerate()
        .map(|(index, c)| {
            if c.is_ascii() {
                Ok(c as u64)
            } else {
                Err(PkiError::NonAscii { index })
            }
        })
        .collect()
}

/// A paired additive key: `(d + e) mod modulus == 0`, so whatever one key
/// encrypts the other decrypts.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct KeyPair {
    /// Private half.
    pub d: u64,
    /// Public half.
    pub e: u64,
    pub modulus: u64,
}

impl KeyPair {
    pub fn public(&self) -> PublicKey {
        PublicKey {
            e: self.e,
            modulus: self.modulus,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PublicKey {
    pub e: u64,
    pub modulus: u64,
}

/// Deterministic key pair from a seed: `d = (seed mod (m-1)) + 1`,
/// `e = m - d`. Both halves are nonzero and pair to zero mod `m`.
pub fn keygen(seed: u64) -> KeyPair {
    let m = DEFAULT_MODULUS;
    let d = (seed % (m - 1)) + 1;
    KeyPair {
        d,
        e: m - d,
        modulus: m,
    }
}

/// Adds `key` to `value` mod `modulus`. `value` must already lie in the
/// cipher domain.
pub fn toy_encrypt(value: u64, key: u64, modulus: u64) -> Result<u64, PkiError> {
    if value >= modulus {
        return Err(PkiError::ValueOutOfRange { value, modulus });
    }
    Ok((value + key % modulus) % modulus)
}

/// Identical arithmetic to [`toy_encrypt`]: adding the paired key walks
/// the value back to where it started.
pub fn toy_decrypt(cipher: u64, key: u64, modulus: u64) -> Result<u64, PkiError> {
    toy_encrypt(cipher, key, modulus)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    Authentic,
    Altered,
    WrongKey,
    Expired,
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Verdict::Authentic => "authentic",
            Verdict::Altered => "altered",
            Verdict::WrongKey => "wrong_key",
            Verdict::Expired => "expired",
        })
    }
}

/// Message with its hash encrypted under the signer's private key.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SignedMessage {
    pub body: String,
    pub appended_cipher: u64,
}

pub fn sign_message(body: &str, signer: &KeyPair) -> Result<SignedMessage, PkiError> {
    let hash = ascii_hash(body)?;
    Ok(SignedMessage {
        body: body.to_string(),
        appended_cipher: toy_encrypt(hash, signer.d, signer.modulus)?,
    })
}

/// Recomputes the body hash and compares it with the decrypted cipher.
/// Never errors: an unhashable body or out-of-range cipher simply cannot
/// match, so it reports `Altered`.
pub fn verify_message(message: &SignedMessage, key: &PublicKey) -> Verdict {
    if check_message(message, key) {
        Verdict::Authentic
    } else {
        Verdict::Altered
    }
}

/// Diagnostic variant: distinguishes a forged body from a mismatched
/// signer. `WrongKey` means the expected signer's key fails but the
/// supplied actual key checks out.
pub fn classify_message(
    message: &SignedMessage,
    expected: &PublicKey,
    actual: &PublicKey,
) -> Verdict {
    if check_message(message, expected) {
        Verdict::Authentic
    } else if check_message(message, actual) {
        Verdict::WrongKey
    } else {
        Verdict::Altered
    }
}

fn check_message(message: &SignedMessage, key: &PublicKey) -> bool {
    let hash = match ascii_hash(&message.body) {
        Ok(h) => h,
        Err(_) => return false,
    };
    match toy_decrypt(message.appended_cipher, key.e, key.modulus) {
        Ok(recovered) => recovered == hash,
        Err(_) => false,
    }
}

/// Certificate binding a subject to its public key for a validity window,
/// signed by a certificate authority over the canonical body.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Certificate {
    pub subject: String,
    pub public_key: PublicKey,
    pub valid_from: u64,
    pub valid_until: u64,
    pub issuer: String,
    pub serial: u64,
    pub ca_signature: u64,
}

impl Certificate {
    /// The exact byte string the authority signs:
    /// `subject|e|m|from|until|issuer|serial`.
    pub fn canonical_body(&self) -> String {
        format!(
            "{}|{}|{}|{}|{}|{}|{}",
            self.subject,
            self.public_key.e,
            self.public_key.modulus,
            self.valid_from,
            self.valid_until,
            self.issuer,
            self.serial
        )
    }
}

#[allow(clippy::too_many_arguments)]
pub fn issue_certificate(
    subject: &str,
    subject_key: PublicKey,
    valid_from: u64,
    valid_until: u64,
    issuer: &str,
    serial: u64,
    ca: &KeyPair,
) -> Result<Certificate, PkiError> {
    if valid_from > valid_until {
        return Err(PkiError::BadValidity {
            from: valid_from,
            until: valid_until,
        });
    }
    let mut cert = Certificate {
        subject: subject.to_string(),
        public_key: subject_key,
        valid_from,
        valid_until,
        issuer: issuer.to_string(),
        serial,
        ca_signature: 0,
    };
    let hash = ascii_hash(&cert.canonical_body())?;
    cert.ca_signature = toy_encrypt(hash, ca.d, ca.modulus)?;
    Ok(cert)
}

/// Expiry is checked before the signature: an expired certificate reports
/// `Expired` even if its body was also tampered with.
pub fn verify_certificate(cert: &Certificate, ca_key: &PublicKey, now: u64) -> Verdict {
    if now < cert.valid_from || now > cert.valid_until {
        return Verdict::Expired;
    }
    let hash = match ascii_hash(&cert.canonical_body()) {
        Ok(h) => h,
        Err(_) => return Verdict::Altered,
    };
    match toy_decrypt(cert.ca_signature, ca_key.e, ca_key.modulus) {
        Ok(recovered) if recovered == hash => Verdict::Authentic,
        _ => Verdict::Altered,
    }
}

/// Document ciphered under the signer's private key, together with the
/// signature cipher over its hash, the signer's certificate, and the hash
/// of the signer's handwritten signature image.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SignedDocument {
    pub encrypted_document: Vec<u64>,
    pub signature_cipher: u64,
    pub certificate: Certificate,
    pub signer_signature_image_hash: u64,
}

pub fn sign_document(
    document: &str,
    certificate: Certificate,
    signer: &KeyPair,
    signature_image_hash: u64,
) -> Result<SignedDocument, PkiError> {
    let terms = hash_terms(document)?;
    let encrypted_document = terms
        .iter()
        .map(|&code| toy_encrypt(code, signer.d, signer.modulus))
        .collect::<Result<Vec<u64>, PkiError>>()?;
    let hash: u64 = terms.iter().sum();
    Ok(SignedDocument {
        encrypted_document,
        signature_cipher: toy_encrypt(hash, signer.d, signer.modulus)?,
        certificate,
        signer_signature_image_hash: signature_image_hash,
    })
}

/// Checks the certificate, then compares the hash of the decrypted
/// document against the decrypted signature. The document hash is the sum
/// of the decrypted elements, so as with messages, sum-preserving
/// tampering is undetectable by design.
pub fn verify_document(doc: &SignedDocument, ca_key: &PublicKey, now: u64) -> Verdict {
    match verify_certificate(&doc.certificate, ca_key, now) {
        Verdict::Authentic => {}
        other => return other,
    }
    let key = doc.certificate.public_key;
    let mut document_hash: u64 = 0;
    for &element in &doc.encrypted_document {
        match toy_decrypt(element, key.e, key.modulus) {
            Ok(code) => document_hash += code,
            Err(_) => return Verdict::Altered,
        }
    }
    match toy_decrypt(doc.signature_cipher, key.e, key.modulus) {
        Ok(signature_hash) if signature_hash == document_hash => Verdict::Authentic,
        _ => Verdict::Altered,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    const MAIL: &str = "The check is in the mail.";

    // Code points of MAIL, frozen independently of hash_terms.
    const MAIL_TERMS: [u64; 25] = [
        84, 104, 101, 32, 99, 104, 101, 99, 107, 32, 105, 115, 32, 105, 110, 32, 116, 104, 101, 32,
        109, 97, 105, 108, 46,
    ];

    #[test]
    fn worked_hash_example() {
        assert_eq!(MAIL_TERMS.iter().sum::<u64>(), 2180);
        assert_eq!(hash_terms(MAIL).unwrap(), MAIL_TERMS);
        assert_eq!(ascii_hash(MAIL).unwrap(), 2180);
    }

    #[test]
    fn hash_edges() {
        assert_eq!(ascii_hash("").unwrap(), 0);
        assert_eq!(ascii_hash("A").unwrap(), 65);
        assert_eq!(ascii_hash("naïve"), Err(PkiError::NonAscii { index: 2 }));
    }

    #[test]
    fn keygen_worked_examples() {
        let kp = keygen(0);
        assert_eq!((kp.d, kp.e), (1, 1_000_002));
        let kp = keygen(5);
        assert_eq!((kp.d, kp.e), (6, 999_997));
        // One full wrap of the seed space: d returns to 2.
        let kp = keygen(1_000_003);
        assert_eq!((kp.d, kp.e), (2, 1_000_001));
    }

    #[test]
    fn cipher_worked_examples() {
        assert_eq!(toy_encrypt(2180, 1, DEFAULT_MODULUS).unwrap(), 2181);
        assert_eq!(toy_decrypt(2181, 1_000_002, DEFAULT_MODULUS).unwrap(), 2180);
        assert!(matches!(
            toy_encrypt(DEFAULT_MODULUS, 1, DEFAULT_MODULUS),
            Err(PkiError::ValueOutOfRange { .. })
        ));
    }

    #[test]
    fn sign_verify_and_tamper() {
        let kp = keygen(0);
        let signed = sign_message(MAIL, &kp).unwrap();
        assert_eq!(signed.appended_cipher, 2181);
        assert_eq!(verify_message(&signed, &kp.public()), Verdict::Authentic);

        let tampered = SignedMessage {
            body: MAIL.replace("mail", "mbil"),
            appended_cipher: signed.appended_cipher,
        };
        assert_eq!(verify_message(&tampered, &kp.public()), Verdict::Altered);
    }

    #[test]
    fn transposition_weakness_is_real() {
        let kp = keygen(17);
        let signed = sign_message("stop", &kp).unwrap();
        let swapped = SignedMessage {
            body: "spot".into(),
            appended_cipher: signed.appended_cipher,
        };
        assert_ne!(signed.body, swapped.body);
        assert_eq!(verify_message(&swapped, &kp.public()), Verdict::Authentic);
    }

    #[test]
    fn wrong_key_is_distinguishable_only_with_both_keys() {
        let signer = keygen(41);
        let other = keygen(99);
        assert_ne!(signer.d, other.d);
        let signed = sign_message(MAIL, &signer).unwrap();
        // With one key the failure is indistinguishable from tampering.
        assert_eq!(verify_message(&signed, &other.public()), Verdict::Altered);
        assert_eq!(
            classify_message(&signed, &other.public(), &signer.public()),
            Verdict::WrongKey
        );
        assert_eq!(
            classify_message(&signed, &signer.public(), &other.public()),
            Verdict::Authentic
        );
    }

    fn test_cert(subject_seed: u64, ca: &KeyPair) -> Certificate {
        issue_certificate(
            "alice",
            keygen(subject_seed).public(),
            10,
            99,
            "ToyCA",
            7,
            ca,
        )
        .unwrap()
    }

    #[test]
    fn certificate_round_trip_and_checks() {
        let ca = keygen(1000);
        let cert = test_cert(3, &ca);
        assert_eq!(cert.canonical_body(), "alice|999999|1000003|10|99|ToyCA|7");
        assert_eq!(
            verify_certificate(&cert, &ca.public(), 50),
            Verdict::Authentic
        );
        assert_eq!(
            verify_certificate(&cert, &ca.public(), 100),
            Verdict::Expired
        );
        assert_eq!(verify_certificate(&cert, &ca.public(), 9), Verdict::Expired);

        let mut forged = cert.clone();
        forged.subject = "mallory".into();
        assert_eq!(
            verify_certificate(&forged, &ca.public(), 50),
            Verdict::Altered
        );
        // Expiry wins over tampering.
        assert_eq!(
            verify_certificate(&forged, &ca.public(), 100),
            Verdict::Expired
        );

        assert!(matches!(
            issue_certificate("b", ca.public(), 9, 8, "CA", 1, &ca),
            Err(PkiError::BadValidity { .. })
        ));
    }

    #[test]
    fn document_cipher_worked_example() {
        let ca = keygen(1000);
        let signer = keygen(0);
        let cert = test_cert(0, &ca);
        let doc = sign_document("Hi", cert, &signer, 4242).unwrap();
        assert_eq!(doc.encrypted_document, vec![73, 106]);
        assert_eq!(doc.signature_cipher, 72 + 105 + 1);
    }

    #[test]
    fn document_verification_follows_the_two_hash_comparison() {
        let ca = keygen(1000);
        let signer_seed = 12;
        let signer = keygen(signer_seed);
        let cert = test_cert(signer_seed, &ca);
        let doc = sign_document(MAIL, cert, &signer, 4242).unwrap();
        assert_eq!(verify_document(&doc, &ca.public(), 50), Verdict::Authentic);

        let mut flipped = doc.clone();
        flipped.encrypted_document[3] = (flipped.encrypted_document[3] + 1) % DEFAULT_MODULUS;
        assert_eq!(
            verify_document(&flipped, &ca.public(), 50),
            Verdict::Altered
        );

        let mut sig_flipped = doc.clone();
        sig_flipped.signature_cipher = (sig_flipped.signature_cipher + 5) % DEFAULT_MODULUS;
        assert_eq!(
            verify_document(&sig_flipped, &ca.public(), 50),
            Verdict::Altered
        );

        assert_eq!(verify_document(&doc, &ca.public(), 1000), Verdict::Expired);

        // The additive hash cannot see order: swapping two cipher elements
        // preserves the sum and still verifies.
        let mut swapped = doc.clone();
        swapped.encrypted_document.swap(0, 4);
        assert_ne!(swapped.encrypted_document, doc.encrypted_document);
        assert_eq!(
            verify_document(&swapped, &ca.public(), 50),
            Verdict::Authentic
        );
    }

    proptest! {
        #[test]
        fn keygen_always_pairs_to_zero(seed in any::<u64>()) {
            let kp = keygen(seed);
            prop_assert!(kp.d >= 1 && kp.d < kp.modulus);
            prop_assert!(kp.e >= 1 && kp.e < kp.modulus);
            prop_assert_eq!((kp.d + kp.e) % kp.modulus, 0);
        }

        #[test]
        fn decrypt_undoes_encrypt(value in 0u64..DEFAULT_MODULUS, seed in any::<u64>()) {
            let kp = keygen(seed);
            let cipher = toy_encrypt(value, kp.d, kp.modulus).unwrap();
            prop_assert!(cipher < kp.modulus);
            prop_assert_eq!(toy_decrypt(cipher, kp.e, kp.modulus).unwrap(), value);
        }

        #[test]
        fn hash_is_additive_over_concatenation(a in "[ -~]{0,80}", b in "[ -~]{0,80}") {
            let joined = format!("{a}{b}");
            prop_assert_eq!(
                ascii_hash(&joined).unwrap(),
                ascii_hash(&a).unwrap() + ascii_hash(&b).unwrap()
            );
        }

        #[test]
        fn single_substitution_always_detected(
            body in "[ -~]{1,120}",
            index in any::<prop::sample::Index>(),
            replacement in 32u8..=126u8,
            seed in any::<u64>(),
        ) {
            let replacement = replacement as char;
            let kp = keygen(seed);
            let signed = sign_message(&body, &kp).unwrap();
            let i = index.index(body.len());
            let mut chars: Vec<char> = body.chars().collect();
            prop_assume!(chars[i] != replacement);
            chars[i] = replacement;
            let tampered = SignedMessage {
                body: chars.into_iter().collect(),
                appended_cipher: signed.appended_cipher,
            };
            prop_assert_eq!(verify_message(&tampered, &kp.public()), Verdict::Altered);
        }
    }
}
