//! Screen every origin-fixing quadratic plane map over F_2 against every line
//! through the origin, in four shards, and list the survivors.
use geonil::search::{run_search, SearchResult, SearchSpace, Shard};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let mut merged: Option<SearchResult> = None;
    for index in 0..4 {
        let mut space = SearchSpace::new(2, 2, 1, 3);
        space.shard = Shard { index, count: 4 };
        let part = run_search(&space)?;
        merged = Some(match merged {
            None => part,
            Some(m) => m.merge(part),
        });
    }
    let result = merged.expect("four shards");
    println!("{:?}", result.summary);
    for c in result.candidates.iter().take(10) {
        let depths: Vec<String> = c.levels.iter().map(|l| format!("{:?}", l.max_depth.unwrap_or(0))).collect();
        println!("T = ({}, {})  Y: {} = 0  max depth by m: {}", c.map[0], c.map[1], c.variety, depths.join(" "));
    }
    Ok(())
}
