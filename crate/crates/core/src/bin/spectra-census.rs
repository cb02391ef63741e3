fn main() {
    std::process::exit(spectra_census::cli::main());
}
