//! Properties over randomly generated models: the canonical printer and
//! the parser are mutually inverse, rendering never produces malformed
//! DOT, and validation never panics regardless of how tangled the arcs
//! are.

mod common;

use common::{assert_dot_well_formed, ModelGen};
use flowthing::dsl::{parse, serialize};
use flowthing::render::{render_dot, Level, RenderOptions};
use proptest::prelude::*;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn print_parse_print_is_identity(seed in any::<u64>()) {
        let model = ModelGen::new(seed).model();
        let printed = serialize(&model).expect("generated models are printable");
        let reparsed = parse(&printed)
            .unwrap_or_else(|e| panic!("canonical text should parse: {e}\n{printed}"));
        prop_assert_eq!(&reparsed, &model, "structure drifted through the text form");
        let reprinted = serialize(&reparsed).unwrap();
        prop_assert_eq!(reprinted, printed, "second print differs from first");
    }

    #[test]
    fn rendering_is_well_formed_at_every_level(seed in any::<u64>()) {
        let model = ModelGen::new(seed).model();
        for level in [Level::Full, Level::Machines, Level::Spheres] {
            for show_annotations in [false, true] {
                let options = RenderOptions { level, show_annotations, ..RenderOptions::default() };
                assert_dot_well_formed(&render_dot(&model, &options));
            }
        }
    }

    #[test]
    fn validation_never_panics(seed in any::<u64>()) {
        let model = ModelGen::new(seed).model();
        let _ = flowthing::validate(&model);
    }
}
