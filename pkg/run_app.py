# run_app.py

# Source-checkout launcher: python run_app.py score --key ... --answer ... --report ...
from src.python.main import main

if __name__ == "__main__":
    main()
