#!/usr/bin/env python3
from nematic_shear.presentation.cli.main import main


if __name__ == "__main__":
    raise SystemExit(main())
