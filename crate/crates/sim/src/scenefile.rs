//! Scene description files (TOML) and the scene fingerprint.

use std::fs;
use std::path::Path;

use ckm_core::scene::Scene;
use sha2::{Digest, Sha256};

use crate::error::FormatError;

pub fn scene_to_toml(scene: &Scene) -> Result<String, FormatError> {
    toml::to_string_pretty(scene).map_err(|e| FormatError::Malformed(e.to_string()))
}

pub fn scene_from_toml(text: &str) -> Result<Scene, FormatError> {
    let scene: Scene = toml::from_str(text).map_err(|e| FormatError::Malformed(e.to_string()))?;
    scene.validate()?;
    Ok(scene)
}

pub fn save_scene(path: &Path, scene: &Scene) -> Result<(), FormatError> {
    fs::write(path, scene_to_toml(scene)?).map_err(|e| FormatError::io(path, e))
}

pub fn load_scene(path: &Path) -> Result<Scene, FormatError> {
    let text = fs::read_to_string(path).map_err(|e| FormatError::io(path, e))?;
    scene_from_toml(&text)
}

/// SHA-256 over the canonical JSON encoding, lowercase hex.
pub fn scene_hash(scene: &Scene) -> String {
    let bytes = serde_json::to_vec(scene).expect("scene serializes");
    Sha256::digest(&bytes)
        .iter()
        .map(|b| format!("{b:02x}"))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn desk_round_trips_through_toml() {
        let s = Scene::desk();
        let back = scene_from_toml(&scene_to_toml(&s).unwrap()).unwrap();
        assert_eq!(back, s);
        assert_eq!(scene_hash(&back), scene_hash(&s));
    }

    #[test]
    fn hash_tracks_geometry() {
        let a = Scene::desk();
        let mut b = a.clone();
        b.reflectors[0].max.z += 1.0;
        assert_ne!(scene_hash(&a), scene_hash(&b));
        assert_eq!(scene_hash(&a).len(), 64);
    }

    #[test]
    fn invalid_scene_rejected() {
        let mut s = Scene::desk();
        s.bs = s.reflectors[0].min;
        let text = scene_to_toml(&s).unwrap();
        assert!(matches!(scene_from_toml(&text), Err(FormatError::Invalid(_))));
        assert!(matches!(scene_from_toml("bs = 3"), Err(FormatError::Malformed(_))));
    }
}
