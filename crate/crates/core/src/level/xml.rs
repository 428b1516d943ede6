//! Reader and writer for the Science Birds level XML dialect.

use std::fmt::Write as _;

use roxmltree::{Document, Node};

use super::{Block, BlockType, Material, Orientation, Pig, Structure};
use crate::error::{Error, Result};

/// Irregular Science Birds shapes that are tolerated in input but never decoded.
const IRREGULAR_BLOCKS: [&str; 4] = ["Circle", "CircleSmall", "Triangle", "TriangleHole"];

const ROTATION_TOLERANCE: f64 = 1e-3;

/// Non-structural parts of a level document.
#[derive(Clone, Debug, PartialEq)]
pub struct LevelMeta {
    pub camera_x: f64,
    pub camera_y: f64,
    pub camera_min_width: f64,
    pub camera_max_width: f64,
    pub slingshot_x: f64,
    pub slingshot_y: f64,
    pub birds: Vec<String>,
}

impl Default for LevelMeta {
    fn default() -> Self {
        LevelMeta {
            camera_x: 0.0,
            camera_y: 2.0,
            camera_min_width: 20.0,
            camera_max_width: 30.0,
            slingshot_x: -8.0,
            slingshot_y: -2.5,
            birds: vec!["BirdRed".to_string()],
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ParsedLevel {
    pub structure: Structure,
    /// One entry per skipped element.
    pub warnings: Vec<String>,
}

fn line_of(doc: &Document, node: Node) -> u32 {
    doc.text_pos_at(node.range().start).row
}

fn validation(line: u32, attribute: &str, message: impl Into<String>) -> Error {
    Error::Validation {
        line,
        attribute: attribute.to_string(),
        message: message.into(),
    }
}

fn required<'a>(doc: &Document, node: Node<'a, '_>, name: &str) -> Result<&'a str> {
    node.attribute(name)
        .ok_or_else(|| validation(line_of(doc, node), name, "missing"))
}

fn number(doc: &Document, node: Node, name: &str) -> Result<f64> {
    let raw = required(doc, node, name)?;
    match raw.trim().parse::<f64>() {
        Ok(v) if v.is_finite() => Ok(v),
        _ => Err(validation(
            line_of(doc, node),
            name,
            format!("`{raw}` is not a finite number"),
        )),
    }
}

fn orientation(doc: &Document, node: Node) -> Result<Orientation> {
    let rotation = match node.attribute("rotation") {
        Some(_) => number(doc, node, "rotation")?,
        None => 0.0,
    };
    let folded = rotation.rem_euclid(180.0);
    if folded < ROTATION_TOLERANCE || 180.0 - folded < ROTATION_TOLERANCE {
        Ok(Orientation::Horizontal)
    } else if (folded - 90.0).abs() < ROTATION_TOLERANCE {
        Ok(Orientation::Vertical)
    } else {
        Err(validation(
            line_of(doc, node),
            "rotation",
            format!("{rotation} is not a multiple of 90 degrees"),
        ))
    }
}

/// Parses a level document into its block structure.
///
/// Elements other than `Block` and `Pig` inside `GameObjects` (TNT, platforms,
/// irregular blocks) are skipped and reported in `warnings`.
pub fn parse_level(text: &str) -> Result<ParsedLevel> {
    let doc = Document::parse(text).map_err(|e| {
        let pos = e.pos();
        Error::Xml {
            line: pos.row,
            column: pos.col,
            message: e.to_string(),
        }
    })?;

    let objects = doc
        .descendants()
        .find(|n| n.has_tag_name("GameObjects"))
        .ok_or_else(|| validation(1, "GameObjects", "element not found"))?;

    let mut structure = Structure::default();
    let mut warnings = Vec::new();
    for node in objects.children().filter(Node::is_element) {
        let line = line_of(&doc, node);
        match node.tag_name().name() {
            "Block" => {
                let type_name = required(&doc, node, "type")?;
                let block_type = match type_name.parse::<BlockType>() {
                    Ok(t) => t,
                    Err(()) if IRREGULAR_BLOCKS.contains(&type_name) => {
                        warnings.push(format!("line {line}: skipped irregular block {type_name}"));
                        continue;
                    }
                    Err(()) => {
                        return Err(validation(
                            line,
                            "type",
                            format!("unknown block type `{type_name}`"),
                        ))
                    }
                };
                let material_name = required(&doc, node, "material")?;
                let material = material_name.parse::<Material>().map_err(|()| {
                    validation(
                        line,
                        "material",
                        format!("unknown material `{material_name}`"),
                    )
                })?;
                let orientation = orientation(&doc, node)?;
                structure.blocks.push(Block::new(
                    block_type,
                    material,
                    orientation,
                    number(&doc, node, "x")?,
                    number(&doc, node, "y")?,
                ));
            }
            "Pig" => {
                structure
                    .pigs
                    .push(Pig::new(number(&doc, node, "x")?, number(&doc, node, "y")?));
            }
            other => warnings.push(format!("line {line}: skipped {other} element")),
        }
    }
    Ok(ParsedLevel {
        structure,
        warnings,
    })
}

/// Shortest round-trip representation, padded to at least four decimals.
fn fmt_num(v: f64) -> String {
    let v = if v == 0.0 { 0.0 } else { v };
    let mut s = format!("{v}");
    let decimals = match s.find('.') {
        Some(dot) => s.len() - dot - 1,
        None => {
            s.push('.');
            0
        }
    };
    for _ in decimals..4 {
        s.push('0');
    }
    s
}

/// Writes a complete, loadable level document for `structure`.
pub fn serialize_level(structure: &Structure, meta: &LevelMeta) -> String {
    let mut out = String::new();
    out.push_str("<?xml version=\"1.0\" encoding=\"utf-8\"?>\n");
    out.push_str("<Level width=\"2\">\n");
    let _ = writeln!(
        out,
        "  <Camera x=\"{}\" y=\"{}\" minWidth=\"{}\" maxWidth=\"{}\" />",
        fmt_num(meta.camera_x),
        fmt_num(meta.camera_y),
        fmt_num(meta.camera_min_width),
        fmt_num(meta.camera_max_width)
    );
    out.push_str("  <Birds>\n");
    for bird in &meta.birds {
        let _ = writeln!(out, "    <Bird type=\"{bird}\" />");
    }
    out.push_str("  </Birds>\n");
    let _ = writeln!(
        out,
        "  <Slingshot x=\"{}\" y=\"{}\" />",
        fmt_num(meta.slingshot_x),
        fmt_num(meta.slingshot_y)
    );
    out.push_str("  <GameObjects>\n");
    for b in &structure.blocks {
        let _ = writeln!(
            out,
            "    <Block type=\"{}\" material=\"{}\" x=\"{}\" y=\"{}\" rotation=\"{}\" />",
            b.block_type,
            b.material,
            fmt_num(b.cx),
            fmt_num(b.cy),
            b.orientation.degrees()
        );
    }
    for p in &structure.pigs {
        let _ = writeln!(
            out,
            "    <Pig type=\"BasicSmall\" material=\"\" x=\"{}\" y=\"{}\" rotation=\"0\" />",
            fmt_num(p.cx),
            fmt_num(p.cy)
        );
    }
    out.push_str("  </GameObjects>\n");
    out.push_str("</Level>\n");
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn wrap(objects: &str) -> String {
        format!("<?xml version=\"1.0\" encoding=\"utf-16\"?>\n<Level width=\"2\">\n<GameObjects>\n{objects}\n</GameObjects>\n</Level>\n")
    }

    #[test]
    fn single_rect_fat() {
        let xml = wrap(r#"<Block type="RectFat" material="wood" x="0" y="0.215" rotation="0" />"#);
        let parsed = parse_level(&xml).unwrap();
        assert_eq!(
            parsed.structure.blocks,
            vec![Block::new(
                BlockType::RectFat,
                Material::Wood,
                Orientation::Horizontal,
                0.0,
                0.215
            )]
        );
        assert!(parsed.warnings.is_empty());
    }

    #[test]
    fn rotation_normalization() {
        for (rot, expected) in [
            ("270", Orientation::Vertical),
            ("90.0", Orientation::Vertical),
            ("180", Orientation::Horizontal),
            ("-90", Orientation::Vertical),
            ("359.9995", Orientation::Horizontal),
        ] {
            let xml = wrap(&format!(
                r#"<Block type="RectBig" material="ice" x="0" y="1" rotation="{rot}" />"#
            ));
            let s = parse_level(&xml).unwrap().structure;
            assert_eq!(s.blocks[0].orientation, expected, "rotation {rot}");
        }
    }

    #[test]
    fn bad_rotation_is_rejected() {
        let xml = wrap(r#"<Block type="RectBig" material="ice" x="0" y="1" rotation="45" />"#);
        match parse_level(&xml) {
            Err(Error::Validation { attribute, .. }) => assert_eq!(attribute, "rotation"),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn misspelled_type_names_attribute() {
        let xml = wrap(r#"<Block type="RectBigg" material="ice" x="0" y="1" rotation="0" />"#);
        match parse_level(&xml) {
            Err(Error::Validation {
                attribute, line, ..
            }) => {
                assert_eq!(attribute, "type");
                assert_eq!(line, 4);
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn unknown_material_rejected() {
        let xml = wrap(r#"<Block type="RectBig" material="glass" x="0" y="1" rotation="0" />"#);
        assert!(matches!(
            parse_level(&xml),
            Err(Error::Validation { ref attribute, .. }) if attribute == "material"
        ));
    }

    #[test]
    fn malformed_xml_has_line() {
        let err = parse_level("<Level>\n<GameObjects>\n<Block type=\"x\"\n</Level>").unwrap_err();
        match err {
            Error::Xml { line, .. } => assert!(line >= 3),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn skips_non_structural_elements() {
        let xml = wrap(
            r#"<Block type="SquareTiny" material="stone" x="1" y="0.11" rotation="0" />
<TNT type="" x="0" y="0" rotation="0" />
<Platform type="Platform" x="3" y="3" />
<Block type="Circle" material="wood" x="2" y="0.5" rotation="0" />
<Pig type="BasicMedium" material="" x="0.5" y="0.5" rotation="0" />"#,
        );
        let parsed = parse_level(&xml).unwrap();
        assert_eq!(parsed.structure.blocks.len(), 1);
        assert_eq!(parsed.structure.pigs.len(), 1);
        assert_eq!(parsed.warnings.len(), 3);
    }

    #[test]
    fn empty_structure_serializes_empty_objects() {
        let xml = serialize_level(&Structure::default(), &LevelMeta::default());
        assert!(xml.contains("<GameObjects>\n  </GameObjects>"));
        assert!(xml.contains("<Bird type=\"BirdRed\" />"));
        assert!(xml.contains("<Slingshot x=\"-8.0000\" y=\"-2.5000\" />"));
        let parsed = parse_level(&xml).unwrap();
        assert!(parsed.structure.is_empty());
    }

    #[test]
    fn single_block_document() {
        let s = Structure::new(
            vec![Block::new(
                BlockType::RectSmall,
                Material::Stone,
                Orientation::Vertical,
                0.5,
                0.425,
            )],
            vec![],
        );
        let xml = serialize_level(&s, &LevelMeta::default());
        assert_eq!(xml.matches("<Block ").count(), 1);
        assert!(xml.contains("rotation=\"90\""));
        assert!(xml.contains("x=\"0.5000\" y=\"0.4250\""));
    }

    #[test]
    fn number_format_keeps_precision() {
        assert_eq!(fmt_num(0.5), "0.5000");
        assert_eq!(fmt_num(-3.0), "-3.0000");
        assert_eq!(fmt_num(-0.0), "0.0000");
        assert_eq!(fmt_num(0.123456789), "0.123456789");
    }

    fn arb_structure() -> impl Strategy<Value = Structure> {
        let block = (
            0usize..8,
            0usize..3,
            any::<bool>(),
            -50.0f64..50.0,
            -50.0f64..50.0,
        )
            .prop_map(|(t, m, v, x, y)| {
                Block::new(
                    BlockType::ALL[t],
                    Material::ALL[m],
                    if v {
                        Orientation::Vertical
                    } else {
                        Orientation::Horizontal
                    },
                    x,
                    y,
                )
            });
        let pig = (-50.0f64..50.0, -50.0f64..50.0).prop_map(|(x, y)| Pig::new(x, y));
        (
            proptest::collection::vec(block, 0..12),
            proptest::collection::vec(pig, 0..4),
        )
            .prop_map(|(blocks, pigs)| Structure::new(blocks, pigs))
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(100))]

        #[test]
        fn parse_inverts_serialize(s in arb_structure()) {
            let xml = serialize_level(&s, &LevelMeta::default());
            let back = parse_level(&xml).unwrap();
            prop_assert!(back.warnings.is_empty());
            prop_assert_eq!(&back.structure, &s);
        }

        #[test]
        fn serializer_emits_only_catalog_names(s in arb_structure()) {
            let xml = serialize_level(&s, &LevelMeta::default());
            let doc = Document::parse(&xml).unwrap();
            for n in doc.descendants().filter(|n| n.has_tag_name("Block")) {
                prop_assert!(n.attribute("type").unwrap().parse::<BlockType>().is_ok());
                prop_assert!(matches!(n.attribute("rotation"), Some("0") | Some("90")));
            }
        }
    }
}
