use sha2::{Digest, Sha256};

use super::{GuiComponent, ModelError};

/// Computes the identity hash of a screen from its flattened (pre-order)
/// component tree.
///
/// Only widget kind, width, height and child count take part, so screens that
/// differ in text, position or asset paths collapse onto one vertex. The
/// digest is the first 64 bits of SHA-256 over the serialized shape, rendered
/// as lowercase hex.
pub fn fingerprint_screen(components: &[GuiComponent]) -> Result<String, ModelError> {
    if components.is_empty() {
        return Err(ModelError::EmptyScreen);
    }
    let roots = components.iter().filter(|c| c.parent.is_none()).count();
    let mut shape = format!("roots:{roots};");
    // Pre-order plus child counts determines the tree shape uniquely.
    for c in components {
        shape.push_str(&format!(
            "{}|{}|{}|{};",
            c.kind,
            c.bounds.width(),
            c.bounds.height(),
            c.children.len()
        ));
    }
    let digest = Sha256::digest(shape.as_bytes());
    Ok(hex::encode(&digest[..8]))
}
