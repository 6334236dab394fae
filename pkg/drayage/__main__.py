from drayage.main import main

raise SystemExit(main())
