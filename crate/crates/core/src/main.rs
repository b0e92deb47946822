fn main() -> std::process::ExitCode {
    ldlab::cli::main()
}
