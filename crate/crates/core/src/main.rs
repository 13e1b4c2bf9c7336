fn main() -> std::process::ExitCode {
    symflow::cli::main()
}
