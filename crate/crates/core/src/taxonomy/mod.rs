//! Grasp taxonomy: 33 grasp classes with type, opposition, thumb position,
//! virtual-finger allocation, and minimum finger count, answering
//! classification and filter queries. The table ships as an embedded,
//! versioned resource; `export_csv` re-emits it for documentation.
//!
//! Virtual-finger allocation follows the revised three-finger convention:
//! the thumb is VF1, the index finger VF2, and the remaining three fingers
//! act together as VF3.

use std::collections::BTreeSet;
use std::fmt;

use thiserror::Error;

/// Embedded taxonomy data, revision 1.
const TABLE_V1: &str = include_str!("table_v1.csv");

pub const EXPORT_HEADER: &str = "id,name,type,opposition,thumb,vf1,vf2,vf3,min_fingers";

/// Thumb finger id in the 1-5 numbering (thumb..little).
pub const THUMB: u8 = 1;
pub const INDEX: u8 = 2;

#[derive(Debug, Error)]
pub enum TaxonomyError {
    #[error("corrupt embedded taxonomy data at line {line}: {message}")]
    CorruptData { line: usize, message: String },
    #[error("grasp query must set at least one field")]
    EmptyQuery,
    #[error("active finger set must be non-empty")]
    NoActiveFingers,
    #[error("finger ids must lie in 1..=5, got {0}")]
    BadFingerId(u8),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum GraspType {
    Power,
    Precision,
    Intermediate,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Opposition {
    Palm,
    Pad,
    Side,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ThumbPosition {
    Abducted,
    Adducted,
}

impl fmt::Display for GraspType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            GraspType::Power => "Power",
            GraspType::Precision => "Precision",
            GraspType::Intermediate => "Intermediate",
        })
    }
}

impl fmt::Display for Opposition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Opposition::Palm => "Palm",
            Opposition::Pad => "Pad",
            Opposition::Side => "Side",
        })
    }
}

impl fmt::Display for ThumbPosition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ThumbPosition::Abducted => "Abducted",
            ThumbPosition::Adducted => "Adducted",
        })
    }
}

/// One element of a virtual-finger set: a real finger (1 = thumb .. 5 =
/// little) or the palm. `optional` preserves parenthesized table entries
/// whose participation depends on the grasped object.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct VfMember {
    pub part: HandPart,
    pub optional: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum HandPart {
    Finger(u8),
    Palm,
}

/// The members allocated to one virtual finger of a grasp class.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct VfSet(pub Vec<VfMember>);

impl VfSet {
    pub fn finger_ids(&self) -> BTreeSet<u8> {
        self.0
            .iter()
            .filter_map(|m| match m.part {
                HandPart::Finger(id) => Some(id),
                HandPart::Palm => None,
            })
            .collect()
    }

    fn parse(field: &str) -> Result<Self, String> {
        let mut members = Vec::new();
        if field.is_empty() {
            return Ok(Self(members));
        }
        for token in field.split('-') {
            let (body, optional) = match token.strip_suffix('~') {
                Some(b) => (b, true),
                None => (token, false),
            };
            let part = if body == "P" {
                HandPart::Palm
            } else {
                let id: u8 = body
                    .parse()
                    .map_err(|_| format!("bad virtual-finger token `{token}`"))?;
                if !(1..=5).contains(&id) {
                    return Err(format!("finger id out of range in `{token}`"));
                }
                HandPart::Finger(id)
            };
            members.push(VfMember { part, optional });
        }
        Ok(Self(members))
    }

    fn serialize(&self) -> String {
        self.0
            .iter()
            .map(|m| {
                let body = match m.part {
                    HandPart::Finger(id) => id.to_string(),
                    HandPart::Palm => "P".to_string(),
                };
                if m.optional {
                    format!("{body}~")
                } else {
                    body
                }
            })
            .collect::<Vec<_>>()
            .join("-")
    }
}

/// One row of the grasp taxonomy table.
#[derive(Debug, Clone, PartialEq)]
pub struct GraspClass {
    pub id: u8,
    pub name: String,
    pub grasp_type: GraspType,
    pub opposition: Opposition,
    pub thumb: ThumbPosition,
    pub vf1: VfSet,
    pub vf2: VfSet,
    pub vf3: VfSet,
    pub min_fingers: u8,
}

impl GraspClass {
    pub fn export_row(&self) -> String {
        format!(
            "{},{},{},{},{},{},{},{},{}",
            self.id,
            self.name,
            self.grasp_type,
            self.opposition,
            self.thumb,
            self.vf1.serialize(),
            self.vf2.serialize(),
            self.vf3.serialize(),
            self.min_fingers
        )
    }
}

/// Attribute filter over the taxonomy. At least one field must be set.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct GraspQuery {
    pub grasp_type: Option<GraspType>,
    pub opposition: Option<Opposition>,
    pub thumb: Option<ThumbPosition>,
    pub max_min_fingers: Option<u8>,
}

impl GraspQuery {
    pub fn is_empty(&self) -> bool {
        self.grasp_type.is_none()
            && self.opposition.is_none()
            && self.thumb.is_none()
            && self.max_min_fingers.is_none()
    }
}

/// Allocation of active real fingers onto the three virtual fingers.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct VFAssignment {
    pub vf1: BTreeSet<u8>,
    pub vf2: BTreeSet<u8>,
    pub vf3: BTreeSet<u8>,
}

/// The loaded taxonomy: immutable after load, safe for concurrent reads.
#[derive(Debug, Clone)]
pub struct TaxonomyTable {
    classes: Vec<GraspClass>,
}

impl TaxonomyTable {
    pub fn classes(&self) -> &[GraspClass] {
        &self.classes
    }

    pub fn len(&self) -> usize {
        self.classes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.classes.is_empty()
    }

    pub fn by_id(&self, id: u8) -> Option<&GraspClass> {
        self.classes.iter().find(|c| c.id == id)
    }

    /// Every class matching all set fields of `q`, ascending id.
    pub fn filter(&self, q: &GraspQuery) -> Result<Vec<&GraspClass>, TaxonomyError> {
        if q.is_empty() {
            return Err(TaxonomyError::EmptyQuery);
        }
        Ok(self
            .classes
            .iter()
            .filter(|c| {
                q.grasp_type.is_none_or(|t| c.grasp_type == t)
                    && q.opposition.is_none_or(|o| c.opposition == o)
                    && q.thumb.is_none_or(|t| c.thumb == t)
                    && q.max_min_fingers.is_none_or(|m| c.min_fingers <= m)
            })
            .collect())
    }

    /// Full table in the export format: header plus one row per class.
    pub fn export_csv(&self) -> String {
        let mut out = String::from(EXPORT_HEADER);
        out.push('\n');
        for c in &self.classes {
            out.push_str(&c.export_row());
            out.push('\n');
        }
        out
    }
}

/// Load the embedded taxonomy table (33 classes, ordered by id).
pub fn load_taxonomy() -> Result<TaxonomyTable, TaxonomyError> {
    parse_table(TABLE_V1)
}

fn parse_table(text: &str) -> Result<TaxonomyTable, TaxonomyError> {
    let corrupt = |line: usize, message: String| TaxonomyError::CorruptData { line, message };
    let mut classes = Vec::new();
    let mut seen_header = false;
    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        if !seen_header {
            if line != EXPORT_HEADER {
                return Err(corrupt(line_no, format!("unexpected header `{line}`")));
            }
            seen_header = true;
            continue;
        }
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != 9 {
            return Err(corrupt(line_no, format!("expected 9 fields, got {}", fields.len())));
        }
        let id: u8 = fields[0]
            .parse()
            .map_err(|_| corrupt(line_no, format!("bad id `{}`", fields[0])))?;
        let grasp_type = match fields[2] {
            "Power" => GraspType::Power,
            "Precision" => GraspType::Precision,
            "Intermediate" => GraspType::Intermediate,
            other => return Err(corrupt(line_no, format!("bad grasp type `{other}`"))),
        };
        let opposition = match fields[3] {
            "Palm" => Opposition::Palm,
            "Pad" => Opposition::Pad,
            "Side" => Opposition::Side,
            other => return Err(corrupt(line_no, format!("bad opposition `{other}`"))),
        };
        let thumb = match fields[4] {
            "Abducted" => ThumbPosition::Abducted,
            "Adducted" => ThumbPosition::Adducted,
            other => return Err(corrupt(line_no, format!("bad thumb position `{other}`"))),
        };
        let vf1 = VfSet::parse(fields[5]).map_err(|m| corrupt(line_no, m))?;
        let vf2 = VfSet::parse(fields[6]).map_err(|m| corrupt(line_no, m))?;
        let vf3 = VfSet::parse(fields[7]).map_err(|m| corrupt(line_no, m))?;
        let min_fingers: u8 = fields[8]
            .parse()
            .map_err(|_| corrupt(line_no, format!("bad min_fingers `{}`", fields[8])))?;
        if !(2..=3).contains(&min_fingers) {
            return Err(corrupt(line_no, format!("min_fingers out of range: {min_fingers}")));
        }

        // A real finger may appear in at most one virtual finger per class.
        let mut seen_fingers = BTreeSet::new();
        for set in [&vf1, &vf2, &vf3] {
            for id in set.finger_ids() {
                if !seen_fingers.insert(id) {
                    return Err(corrupt(line_no, format!("finger {id} assigned to two VFs")));
                }
            }
        }

        classes.push(GraspClass {
            id,
            name: fields[1].to_string(),
            grasp_type,
            opposition,
            thumb,
            vf1,
            vf2,
            vf3,
            min_fingers,
        });
    }

    if classes.len() != 33 {
        return Err(corrupt(0, format!("expected 33 classes, got {}", classes.len())));
    }
    let mut ids: Vec<u8> = classes.iter().map(|c| c.id).collect();
    ids.sort_unstable();
    ids.dedup();
    if ids.len() != 33 {
        return Err(corrupt(0, "duplicate class ids".into()));
    }
    classes.sort_by_key(|c| c.id);
    Ok(TaxonomyTable { classes })
}

/// Allocate active fingers to the three virtual fingers of the tripod
/// model: thumb to VF1, index to VF2, middle/ring/little to VF3.
pub fn assign_virtual_fingers(active: &BTreeSet<u8>) -> Result<VFAssignment, TaxonomyError> {
    if active.is_empty() {
        return Err(TaxonomyError::NoActiveFingers);
    }
    if let Some(&bad) = active.iter().find(|&&id| !(1..=5).contains(&id)) {
        return Err(TaxonomyError::BadFingerId(bad));
    }
    let mut out = VFAssignment::default();
    for &id in active {
        match id {
            1 => out.vf1.insert(id),
            2 => out.vf2.insert(id),
            _ => out.vf3.insert(id),
        };
    }
    Ok(out)
}
