//! Each weighted rectangle as a complete bipartite graph on the vertex set
//! 1..n, in DOT format, plus the per-edge count manifest.
//!
//!     cargo run --example graph_export -- 4 15 out/dot

use std::fs;
use std::path::PathBuf;

use symcirc::artifact::export_dot;
use symcirc::cover2d::build_s2_cover;
use symcirc::zmod::factorize;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let args: Vec<String> = std::env::args().skip(1).collect();
    let n = args.first().map_or(Ok(4), |a| a.parse())?;
    let m = args.get(1).map_or(Ok(15), |a| a.parse())?;
    let cover = build_s2_cover(n, &factorize(m)?)?;
    let export = export_dot(&cover)?;

    print!("{}", export.manifest);
    println!(
        "{} graphs, {} edges with a bad count",
        export.graphs.len(),
        export.bad_edges.len()
    );
    if let Some((name, dot)) = export.graphs.first() {
        println!("{name}:\n{dot}");
    }
    if let Some(dir) = args.get(2).map(PathBuf::from) {
        fs::create_dir_all(&dir)?;
        for (name, dot) in &export.graphs {
            fs::write(dir.join(name), dot)?;
        }
        fs::write(dir.join("manifest.csv"), &export.manifest)?;
    }
    Ok(())
}
