fn main() {
    std::process::exit(mnn_core::cli::dispatch(std::env::args_os()));
}
