fn main() {
    std::process::exit(zzcosheaf::cli::run());
}
