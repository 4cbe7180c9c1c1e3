//! The batch commands driven in-process: build, verify, export-dot.

use std::io;

use symcirc::cli::run;

fn main() {
    let dir = std::env::temp_dir().join("symcirc-example");
    let cover = dir.join("s2_n8_m15.json");
    let cover = cover.to_str().expect("utf-8 path");
    let dot_dir = dir.join("dot");
    let dot_dir = dot_dir.to_str().expect("utf-8 path");
    let steps: [&[&str]; 3] = [
        &["build", "--poly", "s2", "--n", "8", "--m", "15", "--out", cover],
        &["verify", "--input", cover],
        &["export-dot", "--input", cover, "--out-dir", dot_dir],
    ];
    for step in steps {
        println!("$ symcirc {}", step.join(" "));
        let code = run(
            std::iter::once("symcirc").chain(step.iter().copied()),
            &mut io::stdout(),
            &mut io::stderr(),
        );
        println!("exit {code}\n");
    }
}
