use std::path::PathBuf;

fn main() {
    let dir = PathBuf::from(std::env::var("CARGO_MANIFEST_DIR").expect("set by cargo"));
    println!("cargo:rerun-if-changed=src/lib.rs");
    println!("cargo:rerun-if-changed=cbindgen.toml");

    let config = cbindgen::Config::from_file(dir.join("cbindgen.toml")).expect("cbindgen.toml");
    let header = cbindgen::Builder::new()
        .with_crate(&dir)
        .with_config(config)
        .generate()
        .expect("C header generation");

    // Rewrite only on change so the header's mtime stays put between builds.
    let path = dir.join("include/tokenprune.h");
    let mut fresh = Vec::new();
    header.write(&mut fresh);
    if std::fs::read(&path).ok().as_deref() != Some(fresh.as_slice()) {
        std::fs::create_dir_all(path.parent().expect("has parent")).expect("include dir");
        std::fs::write(&path, fresh).expect("write header");
    }
}
