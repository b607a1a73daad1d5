from dynetid.cli import main

raise SystemExit(main())
