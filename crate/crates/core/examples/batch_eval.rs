//! Evaluating the bundled corpus, as `vnqa eval` does.

use vnqa::resources;
use vnqa::service::{run_eval, EvalMode};
use vnqa::Engine;

fn main() {
    let e = Engine::builtin().unwrap();
    let report = run_eval(&e, resources::CORPUS, &EvalMode::Auto);
    print!("{report}");
    for r in report.records.iter().filter(|r| !r.answered) {
        println!("- {} ({:?}: {})", r.question, r.failure, r.note);
    }
}
