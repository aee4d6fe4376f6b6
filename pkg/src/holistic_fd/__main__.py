from holistic_fd.cli import main

main()
