fn main() {
    println!("cargo:rerun-if-changed=src/lib.rs");
    println!("cargo:rerun-if-changed=cbindgen.toml");
    let crate_dir = std::env::var("CARGO_MANIFEST_DIR").expect("CARGO_MANIFEST_DIR");
    match cbindgen::generate(&crate_dir) {
        // write_to_file leaves the file untouched when nothing changed
        Ok(bindings) => {
            bindings.write_to_file(format!("{crate_dir}/include/qesum.h"));
        }
        Err(err) => {
            println!(
                "cargo:warning=cbindgen failed ({err}); keeping the committed include/qesum.h"
            );
        }
    }
}
