import sys

from latent_transport.cli.main import main

sys.exit(main())
