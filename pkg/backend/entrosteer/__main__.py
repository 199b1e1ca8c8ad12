from entrosteer.main import main

main()
