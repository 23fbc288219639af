namespace gridcert {}
