//! Invertible Mealy automata, the self-similar groups they generate, and
//! structural analysis of those groups: word problem, nucleus, contraction,
//! stabilizers, relations and Schreier graphs.

pub mod expr;
pub mod group;
pub mod mealy;
pub mod reference;
pub mod report;
pub mod schreier;
pub mod structure;
pub mod word;

pub use expr::{parse_word, ExprError};
pub use group::{AutomatonGroup, ElementSet, GroupError, Portrait, SectionClosure};
pub use mealy::{Alphabet, AutomatonError, MealyAutomaton, MooreDiagram};
pub use report::{Evidence, PropertyReport, Verdict};
pub use schreier::{GraphFormat, GraphMode, SchreierError, SchreierGraph};
pub use structure::{Nucleus, NucleusCaps, RelatorSet, StructureError};
pub use word::{Generator, GroupWord, Vertex};
