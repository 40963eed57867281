//! Built-in attribute handlers.
//!
//! These are the names a scenario can bind with `handle <stage> with ...`:
//!
//! - `ascii-hash(src, dst)`: hash the text at `src`, write the sum to `dst`.
//! - `toy-encrypt(src, key, dst[, modulus])`: shift `src` by the key attr.
//!   An integer source gives one cipher value; a text source gives a
//!   comma-joined cipher list, one value per character.
//! - `toy-decrypt(src, key, dst[, modulus])`: inverse of the above; a text
//!   source must be a comma-joined cipher list and every decrypted value
//!   must be an ascii code.
//! - `split(key, ...)`: drop every attribute not named.
//! - `compare-eq(a, b, verdict)`: write "true"/"false" to the attr and to
//!   the run's verdict map.
//! - `const(dst, literal)`: set an attribute to a fixed value.
//!
//! `combine` is also bindable but lives in the engine, since it merges
//! tokens instead of rewriting one token's attributes.
//!
//! The modulus for the cipher handlers comes from the named modulus
//! attribute when a fourth argument is given, else from an `m` attribute
//! when the token carries one, else from the default modulus.

use super::{ascii_hash, toy_decrypt, toy_encrypt, DEFAULT_MODULUS};
use crate::sim::{int_attr, text_attr, HandlerCtx, HandlerError, HandlerRegistry, Value};

/// All built-in handlers under their bindable names.
pub fn registry() -> HandlerRegistry {
    let mut r = HandlerRegistry::new();
    r.register("ascii-hash", Box::new(hash_handler as Handler));
    r.register("toy-encrypt", Box::new(encrypt_handler as Handler));
    r.register("toy-decrypt", Box::new(decrypt_handler as Handler));
    r.register("split", Box::new(split_handler as Handler));
    r.register("compare-eq", Box::new(compare_eq_handler as Handler));
    r.register("const", Box::new(const_handler as Handler));
    r
}

type Handler = fn(HandlerCtx<'_>) -> Result<(), HandlerError>;

fn hash_handler(ctx: HandlerCtx<'_>) -> Result<(), HandlerError> {
    let [src, dst] = two_args(ctx.args, "2 (source, destination)")?;
    let text = text_attr(ctx.attrs, src)?.to_string();
    let sum = ascii_hash(&text)?;
    ctx.attrs.insert(dst.to_string(), int_value(sum)?);
    Ok(())
}

fn encrypt_handler(ctx: HandlerCtx<'_>) -> Result<(), HandlerError> {
    cipher_handler(ctx, toy_encrypt, false)
}

fn decrypt_handler(ctx: HandlerCtx<'_>) -> Result<(), HandlerError> {
    cipher_handler(ctx, toy_decrypt, true)
}

fn cipher_handler(
    ctx: HandlerCtx<'_>,
    apply: fn(u64, u64, u64) -> Result<u64, super::PkiError>,
    decode_text: bool,
) -> Result<(), HandlerError> {
    if ctx.args.len() < 3 || ctx.args.len() > 4 {
        return Err(HandlerError::BadArity {
            expected: "3 or 4 (source, key, destination, optional modulus attr)",
            got: ctx.args.len(),
        });
    }
    let (src, key_attr, dst) = (&ctx.args[0], &ctx.args[1], &ctx.args[2]);
    let key = nonneg(ctx.attrs_int(key_attr)?, key_attr)?;
    let modulus = match ctx.args.get(3) {
        Some(attr) => nonneg(ctx.attrs_int(attr)?, attr)?,
        None => match ctx.attrs.get("m") {
            Some(Value::Int(n)) => nonneg(*n, "m")?,
            _ => DEFAULT_MODULUS,
        },
    };
    let out = match ctx.attrs.get(src.as_str()) {
        None => {
            return Err(HandlerError::MissingAttr {
                key: src.to_string(),
            })
        }
        Some(Value::Int(n)) => {
            let value = nonneg(*n, src)?;
            int_value(apply(value, key, modulus)?)?
        }
        Some(Value::Text(text)) => {
            let input: Vec<u64> = if decode_text {
                parse_cipher_list(text, src)?
            } else {
                text.chars()
                    .map(|c| {
                        if c.is_ascii() {
                            Ok(c as u64)
                        } else {
                            Err(HandlerError::Other(format!(
                                "attribute `{src}` contains a non-ascii character"
                            )))
                        }
                    })
                    .collect::<Result<_, _>>()?
            };
            let mut out = Vec::with_capacity(input.len());
            for value in input {
                out.push(apply(value, key, modulus)?);
            }
            if decode_text {
                let mut text = String::with_capacity(out.len());
                for code in out {
                    if code > 127 {
                        return Err(HandlerError::Other(format!(
                            "decrypted value {code} is not an ascii code"
                        )));
                    }
                    text.push(code as u8 as char);
                }
                Value::Text(text)
            } else {
                let parts: Vec<String> = out.iter().map(|v| v.to_string()).collect();
                Value::Text(parts.join(","))
            }
        }
    };
    ctx.attrs.insert(dst.to_string(), out);
    Ok(())
}

fn split_handler(ctx: HandlerCtx<'_>) -> Result<(), HandlerError> {
    if ctx.args.is_empty() {
        return Err(HandlerError::BadArity {
            expected: "at least 1 attribute name",
            got: 0,
        });
    }
    ctx.attrs.retain(|key, _| ctx.args.iter().any(|a| a == key));
    Ok(())
}

fn compare_eq_handler(ctx: HandlerCtx<'_>) -> Result<(), HandlerError> {
    let [a, b, verdict] = three_args(ctx.args, "3 (left, right, verdict name)")?;
    let left = ctx
        .attrs
        .get(a)
        .ok_or_else(|| HandlerError::MissingAttr { key: a.to_string() })?;
    let right = ctx
        .attrs
        .get(b)
        .ok_or_else(|| HandlerError::MissingAttr { key: b.to_string() })?;
    let outcome = if left == right { "true" } else { "false" };
    ctx.verdicts
        .insert(verdict.to_string(), Value::Text(outcome.to_string()));
    ctx.attrs
        .insert(verdict.to_string(), Value::Text(outcome.to_string()));
    Ok(())
}

fn const_handler(ctx: HandlerCtx<'_>) -> Result<(), HandlerError> {
    let [dst, literal] = two_args(ctx.args, "2 (destination, literal)")?;
    let value = match literal.parse::<i64>() {
        Ok(n) => Value::Int(n),
        Err(_) => Value::Text(literal.to_string()),
    };
    ctx.attrs.insert(dst.to_string(), value);
    Ok(())
}

impl HandlerCtx<'_> {
    fn attrs_int(&self, key: &str) -> Result<i64, HandlerError> {
        int_attr(self.attrs, key)
    }
}

fn two_args<'a>(args: &'a [String], expected: &'static str) -> Result<[&'a str; 2], HandlerError> {
    match args {
        [a, b] => Ok([a, b]),
        _ => Err(HandlerError::BadArity {
            expected,
            got: args.len(),
        }),
    }
}

fn three_args<'a>(
    args: &'a [String],
    expected: &'static str,
) -> Result<[&'a str; 3], HandlerError> {
    match args {
        [a, b, c] => Ok([a, b, c]),
        _ => Err(HandlerError::BadArity {
            expected,
            got: args.len(),
        }),
    }
}

fn nonneg(value: i64, key: &str) -> Result<u64, HandlerError> {
    u64::try_from(value).map_err(|_| HandlerError::Other(format!("attribute `{key}` is negative")))
}

fn int_value(value: u64) -> Result<Value, HandlerError> {
    i64::try_from(value)
        .map(Value::Int)
        .map_err(|_| HandlerError::Other(format!("value {value} does not fit an attribute int")))
}

fn parse_cipher_list(text: &str, key: &str) -> Result<Vec<u64>, HandlerError> {
    if text.is_empty() {
        return Ok(Vec::new());
    }
    text.split(',')
        .map(|part| {
            part.parse::<u64>()
                .map_err(|_| HandlerError::BadCipherList {
                    key: key.to_string(),
                })
        })
        .collect()
}
