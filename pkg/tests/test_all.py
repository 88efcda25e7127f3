#!/usr/bin/env python

import unittest
import os
import sys

import utils


def usage():
    print("""
usage:
    python test_all --help | -h
    python test_all [-t]

    -t runs test suite in thorough mode--runs the suite once per sweep
       back-end (dbg and luigi). When the -t is omitted, only uses the
       default back-end

    --help
    -h shows this message
""")
    exit(0)

run_modes = ('dbg', 'luigi')

if __name__ == '__main__':
    suite = unittest.defaultTestLoader.discover(utils.TESTS_PATH)
    if len(sys.argv) > 1:
        if sys.argv[1] == '-t':
            results = {}
            for run_mode in run_modes:
                os.environ['PATCHR0_RUN_MODE'] = run_mode
                suite = unittest.defaultTestLoader.discover(utils.TESTS_PATH)
                results[run_mode] = unittest.TextTestRunner().run(suite)
            print('#' * 80)
            print('#{}Thorough mode executive summary{}#'.format(
                ' ' * 23,
                ' ' * 24))
            print('#' * 80)
            for run_mode, result in results.items():
                print('run mode: {}: ran {}, failed {}'.format(
                    run_mode,
                    result.testsRun,
                    len(result.failures) + len(result.errors)))
                result.printErrors()
                print('#' * 80)
                print()
            total_failures = sum(len(result.failures) + len(result.errors)
                                 for result in results.values())
            print('Summary:')
            print('Ran {} suites: ran {}, failed {}'.format(
                len(results),
                sum(result.testsRun for result in results.values()),
                total_failures))
            exit(total_failures)
        usage()
    os.environ['PATCHR0_RUN_MODE'] = ''
    result = unittest.TextTestRunner().run(suite)
    exit(len(result.failures) + len(result.errors))
