from dgsflow.cli import main

main()
