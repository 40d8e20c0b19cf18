from xxz_quench.cli import main

main()
