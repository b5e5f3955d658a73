//! The committed fixture corpus: scripts encoding the worked examples, each
//! with expectations on orders, transforms, ridges, roles and phenomena.

use crate::dsl::{parse_script, Script};
use crate::error::LabError;
use crate::replay::{replay, Replay, ReplayOptions};

#[derive(Clone, Copy, Debug)]
pub struct Fixture {
    pub name: &'static str,
    pub title: &'static str,
    pub source: &'static str,
}

impl Fixture {
    pub fn script(&self) -> Result<Script, LabError> {
        Ok(parse_script(self.source)?)
    }

    pub fn replay(&self) -> Result<Replay, LabError> {
        replay(&self.script()?, &ReplayOptions::default())
    }
}

const FIXTURES: &[Fixture] = &[
    Fixture {
        name: "ex1_IX1",
        title: "char 3 hypersurface with a level-1 kangaroo",
        source: include_str!("../fixtures/ex1_IX1.bl"),
    },
    Fixture {
        name: "ex1_IX2",
        title: "char 3 hypersurface whose ridge is generated in degree 1",
        source: include_str!("../fixtures/ex1_IX2.bl"),
    },
    Fixture {
        name: "ex1_IX3",
        title: "char 3 ideal whose ridge is masked by a higher-order generator",
        source: include_str!("../fixtures/ex1_IX3.bl"),
    },
    Fixture {
        name: "sec3_char2",
        title: "char 2 surface where a later coefficient ideal forces a new hypersurface",
        source: include_str!("../fixtures/sec3_char2.bl"),
    },
    Fixture {
        name: "sec4_1312",
        title: "two kangaroos, both driven by the first hypersurface",
        source: include_str!("../fixtures/sec4_1312.bl"),
    },
    Fixture {
        name: "sec4_2312",
        title: "two kangaroos, the first driven by a dormant hypersurface",
        source: include_str!("../fixtures/sec4_2312.bl"),
    },
];

pub fn all() -> &'static [Fixture] {
    FIXTURES
}

pub fn find(name: &str) -> Option<&'static Fixture> {
    FIXTURES.iter().find(|f| f.name == name)
}
