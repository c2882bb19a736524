//! Writes a synthetic corpus and its manifest: `synth_corpus <dir> <files> <seed> [java]`.

fn main() -> anyhow::Result<()> {
    let args: Vec<String> = std::env::args().collect();
    let dir = std::path::PathBuf::from(args.get(1).map(String::as_str).unwrap_or("corpus"));
    let files = args.get(2).map_or(Ok(100), |s| s.parse())?;
    let seed = args.get(3).map_or(Ok(0), |s| s.parse())?;
    let language = if args.get(4).is_some_and(|s| s == "java") {
        unleak_core::Language::Java
    } else {
        unleak_core::Language::Python
    };
    let manifest = unleak::synth::write_corpus(&dir, language, files, seed)?;
    manifest.save(dir.join("manifest.json"))?;
    println!("{} files, {} bytes", manifest.entries.len(), manifest.total_bytes);
    Ok(())
}
