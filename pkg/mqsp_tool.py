"""
Entry point script
"""
from mqsptool.mqsp_cli import main

if __name__ == "__main__":
    main()
