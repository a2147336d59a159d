//! Text payload printed into each floor QR strip.
//!
//! Grammar: `BNAV1|<map_id>|<node_id>|<crc>` where `<crc>` is the CRC-32
//! (IEEE, reflected) of `BNAV1|<map_id>|<node_id>` as 8 lowercase hex digits.

use thiserror::Error;

use crate::map::{is_valid_map_id, NodeId};

pub const PAYLOAD_TAG: &str = "BNAV1";
const DELIMITER: char = '|';

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EncodeError {
    #[error("{field} is empty")]
    EmptyField { field: &'static str },
    #[error("{field} contains the `|` delimiter")]
    Delimiter { field: &'static str },
    #[error("{field} `{value}` has characters not allowed in a payload")]
    InvalidField { field: &'static str, value: String },
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DecodeError {
    #[error("payload is not valid UTF-8")]
    NotUtf8,
    #[error("payload does not start with `BNAV1|`")]
    WrongPrefix,
    #[error("payload has {found} fields, expected 4")]
    WrongFieldCount { found: usize },
    #[error("checksum field `{0}` is not 8 lowercase hex digits")]
    MalformedChecksum(String),
    #[error("checksum mismatch: payload says {found:08x}, content hashes to {computed:08x}")]
    ChecksumMismatch { found: u32, computed: u32 },
    #[error("invalid field: {0}")]
    InvalidField(String),
}

impl DecodeError {
    /// Stable snake_case name, used on the wire.
    pub fn kind(&self) -> &'static str {
        match self {
            DecodeError::NotUtf8 => "not_utf8",
            DecodeError::WrongPrefix => "wrong_prefix",
            DecodeError::WrongFieldCount { .. } => "wrong_field_count",
            DecodeError::MalformedChecksum(_) => "malformed_checksum",
            DecodeError::ChecksumMismatch { .. } => "checksum_mismatch",
            DecodeError::InvalidField(_) => "invalid_field",
        }
    }
}

fn checksum(body: &str) -> u32 {
    crc32fast::hash(body.as_bytes())
}

/// Builds the payload for one strip.
pub fn encode(map_id: &str, node_id: &str) -> Result<String, EncodeError> {
    for (field, value) in [("map_id", map_id), ("node_id", node_id)] {
        if value.is_empty() {
            return Err(EncodeError::EmptyField { field });
        }
        if value.contains(DELIMITER) {
            return Err(EncodeError::Delimiter { field });
        }
    }
    if !is_valid_map_id(map_id) {
        return Err(EncodeError::InvalidField {
            field: "map_id",
            value: map_id.to_string(),
        });
    }
    if NodeId::new(node_id).is_err() {
        return Err(EncodeError::InvalidField {
            field: "node_id",
            value: node_id.to_string(),
        });
    }
    let body = format!("{PAYLOAD_TAG}|{map_id}|{node_id}");
    let crc = checksum(&body);
    Ok(format!("{body}|{crc:08x}"))
}

/// Parses a payload back into `(map_id, node_id)`. Whether the node exists
/// in any particular map is not checked here.
pub fn decode(payload: &str) -> Result<(String, NodeId), DecodeError> {
    let fields: Vec<&str> = payload.split(DELIMITER).collect();
    if fields[0] != PAYLOAD_TAG {
        return Err(DecodeError::WrongPrefix);
    }
    if fields.len() != 4 {
        return Err(DecodeError::WrongFieldCount {
            found: fields.len(),
        });
    }
    let crc_field = fields[3];
    if crc_field.len() != 8
        || !crc_field
            .bytes()
            .all(|b| b.is_ascii_digit() || (b'a'..=b'f').contains(&b))
    {
        return Err(DecodeError::MalformedChecksum(crc_field.to_string()));
    }
    let found = u32::from_str_radix(crc_field, 16)
        .map_err(|_| DecodeError::MalformedChecksum(crc_field.to_string()))?;
    let body_len = payload.len() - crc_field.len() - 1;
    let computed = checksum(&payload[..body_len]);
    if found != computed {
        return Err(DecodeError::ChecksumMismatch { found, computed });
    }
    let (map_id, node_id) = (fields[1], fields[2]);
    if !is_valid_map_id(map_id) {
        return Err(DecodeError::InvalidField(format!("map_id `{map_id}`")));
    }
    let node = NodeId::new(node_id).map_err(|e| DecodeError::InvalidField(e.to_string()))?;
    Ok((map_id.to_string(), node))
}

/// Byte-level entry point for scanners that hand over raw bytes.
pub fn decode_bytes(payload: &[u8]) -> Result<(String, NodeId), DecodeError> {
    let s = std::str::from_utf8(payload).map_err(|_| DecodeError::NotUtf8)?;
    decode(s)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn known_payloads() {
        // reference values from zlib.crc32
        assert_eq!(encode("fcit", "L13").unwrap(), "BNAV1|fcit|L13|32fb0842");
        assert_eq!(encode("fcit", "L1").unwrap(), "BNAV1|fcit|L1|2c0ed139");
        assert_eq!(encode("square", "A").unwrap(), "BNAV1|square|A|066a4bfc");
    }

    #[test]
    fn encode_rejects_bad_fields() {
        assert_eq!(
            encode("m", "a|b"),
            Err(EncodeError::Delimiter { field: "node_id" })
        );
        assert_eq!(
            encode("", "L1"),
            Err(EncodeError::EmptyField { field: "map_id" })
        );
        assert_eq!(
            encode("m", ""),
            Err(EncodeError::EmptyField { field: "node_id" })
        );
        assert!(matches!(
            encode("has space", "L1"),
            Err(EncodeError::InvalidField {
                field: "map_id",
                ..
            })
        ));
    }

    #[test]
    fn decode_round_trip() {
        let p = encode("fcit", "L13").unwrap();
        let (m, n) = decode(&p).unwrap();
        assert_eq!(m, "fcit");
        assert_eq!(n.as_str(), "L13");
    }

    #[test]
    fn decode_errors() {
        assert_eq!(decode("hello world"), Err(DecodeError::WrongPrefix));
        assert!(matches!(
            decode("BNAV1|fcit|L13|00000000"),
            Err(DecodeError::ChecksumMismatch {
                found: 0,
                computed: 0x32fb0842
            })
        ));
        assert_eq!(
            decode("BNAV1|fcit|32fb0842"),
            Err(DecodeError::WrongFieldCount { found: 3 })
        );
        assert!(matches!(
            decode("BNAV1|fcit|L13|32FB0842"),
            Err(DecodeError::MalformedChecksum(_))
        ));
        assert_eq!(decode("").unwrap_err().kind(), "wrong_prefix");
        assert_eq!(decode_bytes(&[0xff, 0xfe]), Err(DecodeError::NotUtf8));
    }

    #[test]
    fn decode_checks_node_charset() {
        // valid checksum over a body whose node id breaks the id rules
        let body = "BNAV1|fcit|bad node";
        let payload = format!("{body}|{:08x}", crc32fast::hash(body.as_bytes()));
        assert!(matches!(
            decode(&payload),
            Err(DecodeError::InvalidField(_))
        ));
    }
}
