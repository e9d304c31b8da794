//! Shortest-path distances, written to and read back from the binary cache.

use bse_core::graphdist::{all_pairs_shortest_paths, node_degrees, read_cache, write_cache};
use bse_core::synthgen::{generate_benchmark, SynthConfig};

fn main() -> bse_core::Result<()> {
    let bench = generate_benchmark(&SynthConfig { n: 300, seed: 3, ..SynthConfig::default() })?;
    let d = all_pairs_shortest_paths(&bench.graph)?;

    let dir = std::env::temp_dir().join("bse-distance-cache");
    std::fs::create_dir_all(&dir).map_err(|e| bse_core::Error::io(&dir, e))?;
    let path = dir.join("distances.bsed");
    write_cache(&path, &d)?;
    let back = read_cache(&path)?;
    assert_eq!(back, d);

    let diameter = d.as_slice().iter().copied().max().unwrap_or(0);
    let degrees = node_degrees(&bench.graph);
    println!("{} nodes, diameter {diameter}, max degree {}", d.len(), degrees.max());
    println!("cache {} ({} bytes, checksum {:016x})", path.display(), std::fs::metadata(&path).map(|m| m.len()).unwrap_or(0), d.checksum());
    Ok(())
}

