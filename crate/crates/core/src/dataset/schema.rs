use std::collections::HashSet;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ColumnKind {
    Numeric,
    Categorical,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Role {
    Feature,
    Target,
    Population,
    Id,
    Metadata,
}

fn default_weight() -> f64 {
    1.0
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SchemaEntry {
    pub name: String,
    pub kind: ColumnKind,
    pub role: Role,
    /// Multiplier applied to the feature's similarity weight. Zero removes
    /// the feature from the dissimilarity.
    #[serde(default = "default_weight")]
    pub weight: f64,
}

impl SchemaEntry {
    pub fn new(name: &str, kind: ColumnKind, role: Role) -> Self {
        Self { name: name.to_string(), kind, role, weight: 1.0 }
    }

    pub fn with_weight(mut self, weight: f64) -> Self {
        self.weight = weight;
        self
    }
}

/// Column declarations for an input table. Serialized as a bare JSON array.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct FeatureSchema {
    pub entries: Vec<SchemaEntry>,
}

impl FeatureSchema {
    pub fn new(entries: Vec<SchemaEntry>) -> Result<Self> {
        let schema = Self { entries };
        schema.validate()?;
        Ok(schema)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let schema: FeatureSchema = serde_json::from_str(text)?;
        schema.validate()?;
        Ok(schema)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_json(&text)
    }

    pub fn validate(&self) -> Result<()> {
        let mut seen = HashSet::new();
        for e in &self.entries {
            if !seen.insert(e.name.as_str()) {
                return Err(Error::InvalidSchema(format!("duplicate column name `{}`", e.name)));
            }
            if !(e.weight >= 0.0 && e.weight.is_finite()) {
                return Err(Error::InvalidSchema(format!(
                    "weight of `{}` must be a finite nonnegative number",
                    e.name
                )));
            }
            if matches!(e.role, Role::Target | Role::Population) && e.kind != ColumnKind::Numeric {
                return Err(Error::InvalidSchema(format!("`{}` must be numeric", e.name)));
            }
        }
        let count = |r: Role| self.entries.iter().filter(|e| e.role == r).count();
        if count(Role::Target) != 1 {
            return Err(Error::InvalidSchema("exactly one target column required".into()));
        }
        if count(Role::Id) != 1 {
            return Err(Error::InvalidSchema("exactly one id column required".into()));
        }
        if count(Role::Population) > 1 {
            return Err(Error::InvalidSchema("at most one population column allowed".into()));
        }
        if count(Role::Feature) == 0 {
            return Err(Error::InvalidSchema("at least one feature column required".into()));
        }
        Ok(())
    }

    fn single(&self, role: Role) -> Option<&SchemaEntry> {
        self.entries.iter().find(|e| e.role == role)
    }

    pub fn id(&self) -> &SchemaEntry {
        self.single(Role::Id).expect("validated schema has an id column")
    }

    pub fn target(&self) -> &SchemaEntry {
        self.single(Role::Target).expect("validated schema has a target column")
    }

    pub fn population(&self) -> Option<&SchemaEntry> {
        self.single(Role::Population)
    }

    pub fn features(&self) -> impl Iterator<Item = &SchemaEntry> {
        self.entries.iter().filter(|e| e.role == Role::Feature)
    }

    pub fn metadata(&self) -> impl Iterator<Item = &SchemaEntry> {
        self.entries.iter().filter(|e| e.role == Role::Metadata)
    }

    pub fn get(&self, name: &str) -> Option<&SchemaEntry> {
        self.entries.iter().find(|e| e.name == name)
    }
}
