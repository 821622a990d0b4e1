fn main() {
    std::process::exit(geonil::cli::main());
}
