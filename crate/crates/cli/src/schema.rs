//! JSON schemas of the payloads, shipped in `schemas/`.

pub const MANIFEST: &str = include_str!("../schemas/manifest.json");

pub fn for_command(name: &str) -> Option<&'static str> {
    Some(match name {
        "code" => include_str!("../schemas/greedy_outcome.json"),
        "pi" => include_str!("../schemas/pi.json"),
        "expansion" => include_str!("../schemas/expansion.json"),
        "cover" | "intersect" => include_str!("../schemas/interval_cover.json"),
        "gaps" => include_str!("../schemas/gaps.json"),
        "dim" => include_str!("../schemas/box_dim.json"),
        "pieces" => include_str!("../schemas/pieces.json"),
        "cantor-ds" => include_str!("../schemas/defining_sequence.json"),
        "thickness" => include_str!("../schemas/thickness.json"),
        "thickness-cl" => include_str!("../schemas/thickness_report.json"),
        "verify" => include_str!("../schemas/ledger.json"),
        "common" => include_str!("../schemas/certificates.json"),
        "manifest" => MANIFEST,
        _ => return None,
    })
}
