fn main() {
    std::process::exit(esampling::cli::main_entry());
}
