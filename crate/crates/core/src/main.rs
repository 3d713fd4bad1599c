fn main() -> std::process::ExitCode {
    lfc_tune::cli::main()
}
