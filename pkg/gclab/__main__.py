from gclab.labcli.cli import main

main()
