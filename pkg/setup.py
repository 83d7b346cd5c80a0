from setuptools import setup, find_packages

setup(
    name="sketch-photo-recognition",
    version="1.0.0",
    packages=find_packages(where="src"),
    package_dir={"": "src"},
    install_requires=[
        "torch>=2.1.0",
        "numpy>=1.24.0",
        "opencv-python-headless>=4.8.0",
        "Pillow>=10.0.0",
        "PyYAML>=6.0",
        "pydantic>=2.4.0",
        "langgraph>=0.1.0",
        "python-dotenv>=1.0.0",
        "rich>=13.0.0"
    ],
    extras_require={
        "test": ["pytest>=7.0.0"]
    },
    entry_points={
        "console_scripts": ["sketchrec=sketch_photo_recognition.cli:main"]
    }
)
