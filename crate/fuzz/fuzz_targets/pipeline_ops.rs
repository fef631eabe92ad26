#![no_main]

use bratteli::dsl::{self, Document};
use libfuzzer_sys::fuzz_target;

// Drive the main library operations off parsed documents: none of them may
// panic, whatever the (structurally valid) input looks like.
fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    let Ok(docs) = dsl::parse_all(text) else {
        return;
    };
    for doc in docs {
        match doc {
            Document::Diagram(d) => {
                let _ = d.validate();
                let _ = bratteli::properties::check_quotient_properties(&d, d.depth(), 1 << 10);
                let _ = d.telescope(&[0, d.depth().saturating_sub(1).max(1)]);
                let _ = bratteli::normalize::trim_dimension_one(&d, 1 << 10);
                let _ = bratteli::realize::build_ultragraph(
                    &d,
                    d.depth().max(2),
                    bratteli::realize::InjectionChoice::Deterministic,
                )
                .map(|g| bratteli::tower::verify_roundtrip(
                    g.diagram(),
                    g.depth(),
                    bratteli::realize::InjectionChoice::Deterministic,
                ));
            }
            Document::Graph(g) => {
                let _ = g.find_cycle();
                let _ = g.decompose_sinks();
                let _ = g.edge_matrix();
            }
            Document::Ultragraph(u) => {
                let _ = u.find_cycle();
                let _ = u.expand();
                let _ = u.edge_matrix();
                let _ = u.m2_unitize();
                let _ = bratteli::tower::find_mn_chain(&u, 3);
            }
            Document::Realized(r) => {
                let _ = bratteli::tower::simulate_direct_limit(&r, r.depth());
            }
            Document::Matrix(m) => {
                let _ = m.find_cycle();
                let _ = m.dual_graph();
                let _ = m.canonical_ultragraph();
            }
            Document::Descriptor(a) => {
                let _ = bratteli::classify::classify(&a);
            }
        }
    }
});
